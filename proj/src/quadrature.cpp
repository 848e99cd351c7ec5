#include "jkolab/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace jkolab {

static GaussRule compute_gauss(int order) {
  if (order < 1) throw std::invalid_argument("gauss order must be >= 1");
  GaussRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  // Newton iteration on Legendre polynomials, symmetric roots.
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[order - 1 - i] = w;
  }
  return r;
}

const GaussRule& gauss_legendre(int order) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss(order)).first;
  return it->second;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       int order) {
  const GaussRule& r = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < order; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order) {
  double s = 0.0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    s += integrate_gauss(f, a + p * w, a + (p + 1) * w, order);
  return s;
}

}  // namespace jkolab

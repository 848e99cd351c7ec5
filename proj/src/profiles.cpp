#include "jkolab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "jkolab/entropy.hpp"
#include "jkolab/quadrature.hpp"

namespace jkolab {

namespace {

double self_similar_beta(double m, int d) {
  const double denom = d * (m - 1.0) + 2.0;
  if (!(denom > 0.0))
    throw std::invalid_argument("Barenblatt profile needs m above the mass-critical exponent");
  return 1.0 / denom;
}

}  // namespace

ExactProfile ExactProfile::gaussian_heat(int dim, Vector2d center) {
  ExactProfile p;
  p.kind = ProfileKind::GaussianHeat;
  p.m = 1.0;
  p.dim = dim;
  p.center = center;
  p.beta = self_similar_beta(1.0, dim);
  return p;
}

ExactProfile ExactProfile::barenblatt_pme(double m, int dim, Vector2d center) {
  if (!(m > 1.0)) throw std::invalid_argument("Barenblatt PME needs m > 1");
  ExactProfile p;
  p.kind = ProfileKind::BarenblattPme;
  p.m = m;
  p.dim = dim;
  p.center = center;
  p.beta = self_similar_beta(m, dim);
  p.kappa = (m - 1.0) * p.beta / (2.0 * m);
  p.amplitude = barenblatt_amplitude(m, dim);
  return p;
}

ExactProfile ExactProfile::barenblatt_fde(double m, int dim, Vector2d center) {
  if (!(m < 1.0) || m <= m_crit_mass(dim))
    throw std::invalid_argument("Barenblatt FDE needs m_c1 < m < 1");
  ExactProfile p;
  p.kind = ProfileKind::BarenblattFde;
  p.m = m;
  p.dim = dim;
  p.center = center;
  p.beta = self_similar_beta(m, dim);
  p.kappa = (1.0 - m) * p.beta / (2.0 * m);
  p.amplitude = barenblatt_amplitude(m, dim);
  return p;
}

double ExactProfile::value(const Vector2d& x, double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("profile time must be positive");
  double r2 = sqr(x[0] - center[0]);
  if (dim == 2) r2 += sqr(x[1] - center[1]);
  switch (kind) {
    case ProfileKind::GaussianHeat:
      return std::pow(4.0 * kPi * t, -0.5 * dim) * std::exp(-r2 / (4.0 * t));
    case ProfileKind::BarenblattPme: {
      const double xi2 = r2 * std::pow(t, -2.0 * beta);
      const double core = amplitude - kappa * xi2;
      if (core <= 0.0) return 0.0;
      return std::pow(t, -dim * beta) * std::pow(core, 1.0 / (m - 1.0));
    }
    case ProfileKind::BarenblattFde: {
      const double xi2 = r2 * std::pow(t, -2.0 * beta);
      return std::pow(t, -dim * beta) *
             std::pow(amplitude + kappa * xi2, 1.0 / (m - 1.0));
    }
  }
  return 0.0;
}

double ExactProfile::value(double x, double t) const {
  return value(Vector2d{x, 0.0}, t);
}

double ExactProfile::support_radius(double t) const {
  if (kind != ProfileKind::BarenblattPme)
    return std::numeric_limits<double>::infinity();
  return std::sqrt(amplitude / kappa) * std::pow(t, beta);
}

double ExactProfile::alpha() const { return dim * beta; }

double barenblatt_mass(double m, int dim, double A) {
  if (!(A > 0.0)) throw std::invalid_argument("amplitude must be positive");
  const double beta = self_similar_beta(m, dim);
  if (m > 1.0) {
    const double kappa = (m - 1.0) * beta / (2.0 * m);
    const double r = std::sqrt(A / kappa);
    const double q = 2.0 / (m - 1.0);
    // x = r sin(theta) maps the support edge to theta = pi/2 and makes the
    // integrand a power of cos(theta).
    auto f = [&](double th) {
      const double c = std::cos(th);
      const double core = std::pow(A, 1.0 / (m - 1.0)) * std::pow(c, q);
      return dim == 1 ? 2.0 * r * core * c
                      : 2.0 * kPi * r * r * core * c * std::sin(th);
    };
    return integrate_panels(f, 0.0, 0.5 * kPi, 64, 16);
  }
  const double kappa = (1.0 - m) * beta / (2.0 * m);
  const double scale = std::sqrt(A / kappa);
  // x = scale * tan(theta) compactifies the infinite tail.
  auto f = [&](double th) {
    const double c = std::cos(th);
    const double core = std::pow(A, 1.0 / (m - 1.0)) * std::pow(c, 2.0 / (1.0 - m));
    const double sec2 = 1.0 / (c * c);
    return dim == 1 ? 2.0 * scale * core * sec2
                    : 2.0 * kPi * scale * scale * core * std::tan(th) * sec2;
  };
  return integrate_panels(f, 0.0, 0.5 * kPi - 1e-14, 256, 12);
}

double barenblatt_amplitude(double m, int dim) {
  // mass(A) is monotone in A (increasing for m > 1, decreasing for m < 1).
  const bool increasing = m > 1.0;
  double lo = 1.0, hi = 1.0;
  auto excess = [&](double A) { return barenblatt_mass(m, dim, A) - 1.0; };
  double flo = excess(lo);
  while ((increasing ? flo > 0.0 : flo < 0.0) && lo > 1e-12) {
    lo *= 0.5;
    flo = excess(lo);
  }
  double fhi = excess(hi);
  while ((increasing ? fhi < 0.0 : fhi > 0.0) && hi < 1e12) {
    hi *= 2.0;
    fhi = excess(hi);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = excess(mid);
    const bool go_right = increasing ? (fm < 0.0) : (fm > 0.0);
    (go_right ? lo : hi) = mid;
    if (hi - lo < 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

// 1D cell average with optional exact splits at the support edges.
double cell_average_1d(const ExactProfile& p, double a, double b, double t) {
  const int order = 12;
  std::vector<double> cuts{a, b};
  if (p.kind == ProfileKind::BarenblattPme) {
    const double r = p.support_radius(t);
    for (double e : {p.center[0] - r, p.center[0] + r})
      if (e > a && e < b) cuts.push_back(e);
    std::sort(cuts.begin(), cuts.end());
  }
  double s = 0.0;
  for (size_t k = 0; k + 1 < cuts.size(); ++k)
    s += integrate_gauss([&](double x) { return p.value(x, t); }, cuts[k],
                         cuts[k + 1], order);
  return s / (b - a);
}

}  // namespace

ArrayXd sample_cell_averages(const ExactProfile& profile, const Grid& grid, double t) {
  if (profile.dim != grid.dim())
    throw std::invalid_argument("profile dimension does not match grid");
  ArrayXd out(grid.size);
  if (grid.dim() == 1) {
    for (int i = 0; i < grid.size; ++i)
      out[i] = cell_average_1d(profile, grid.edge(0, i), grid.edge(0, i + 1), t);
    return out;
  }
  const GaussRule& r = gauss_legendre(8);
  for (int i = 0; i < grid.size; ++i) {
    const int ix = grid.ix(i), iy = grid.iy(i);
    const double cx = grid.center(0, ix), cy = grid.center(1, iy);
    const double hx = 0.5 * grid.h[0], hy = 0.5 * grid.h[1];
    double s = 0.0;
    for (int ax = 0; ax < r.nodes.size(); ++ax)
      for (int ay = 0; ay < r.nodes.size(); ++ay)
        s += r.weights[ax] * r.weights[ay] *
             profile.value(Vector2d{cx + hx * r.nodes[ax], cy + hy * r.nodes[ay]}, t);
    out[i] = 0.25 * s;  // Gauss weights sum to 2 per axis
  }
  return out;
}

GridDensity sample_normalized(const ExactProfile& profile, const Grid& grid, double t) {
  return GridDensity::normalized(grid, sample_cell_averages(profile, grid, t));
}

double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile rank outside (0,1)");
  // Acklam's rational approximation as the seed.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double r = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else if (p > 1.0 - plow) {
    const double r = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else {
    const double r = p - 0.5, s = r * r;
    x = (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * r /
        (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
  }
  // Two Newton corrections through the complementary error function.
  for (int it = 0; it < 2; ++it) {
    const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    if (pdf > 0.0) x -= (cdf - p) / pdf;
  }
  return x;
}

}  // namespace jkolab

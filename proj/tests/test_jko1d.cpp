#include <cmath>
#include <random>

#include "doctest.h"
#include "jkolab/domain.hpp"
#include "jkolab/jko1d.hpp"
#include "jkolab/profiles.hpp"
#include "jkolab/quantile.hpp"

using namespace jkolab;

namespace {

double sqr(double x) { return x * x; }

ArrayXd sorted_uniforms(int n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  ArrayXd q(n);
  for (int i = 0; i < n; ++i) q[i] = u(rng);
  std::sort(q.data(), q.data() + n);
  return q;
}

}  // namespace

TEST_CASE("quantile objective gradient matches finite differences") {
  std::mt19937_64 rng(17);
  for (double m : {0.7, 1.0, 2.0}) {
    for (bool periodic : {false, true}) {
      Domain dom = periodic ? Domain::torus1() : Domain::interval(0.0, 1.0);
      const int n = 24;
      ArrayXd datum = sorted_uniforms(n, 0.05, 0.95, rng);
      ArrayXd q = sorted_uniforms(n, 0.08, 0.92, rng);
      SchemeParams prm{m, 0.05, 1};
      QuantileObjective obj(datum, dom, prm);
      q = obj.project(q);
      const ArrayXd grad = obj.gradient(q);
      for (int j = 0; j < n; j += 3) {
        const double eps = 1e-7;
        ArrayXd qp = q, qm = q;
        qp[j] += eps;
        qm[j] -= eps;
        const double fd = (obj.value(qp) - obj.value(qm)) / (2.0 * eps);
        CHECK(grad[j] == doctest::Approx(fd).epsilon(2e-5));
      }
    }
  }
}

TEST_CASE("feasibility projection is idempotent and satisfies the constraints") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> noise(0.0, 0.4);
  for (bool periodic : {false, true}) {
    Domain dom = periodic ? Domain::torus1() : Domain::interval(0.0, 1.0);
    SchemeParams prm{1.0, 0.01, 1};
    const int n = 64;
    for (int rep = 0; rep < 20; ++rep) {
      ArrayXd y(n);
      for (int j = 0; j < n; ++j) y[j] = 0.5 + noise(rng);
      QuantileObjective obj(sorted_uniforms(n, 0.1, 0.9, rng), dom, prm);
      const ArrayXd p = obj.project(y);
      const ArrayXd pp = obj.project(p);
      CHECK((p - pp).abs().maxCoeff() <= 1e-13);
      for (int j = 0; j + 1 < n; ++j) CHECK(p[j + 1] - p[j] >= obj.gap_floor() - 1e-15);
      if (periodic) {
        CHECK(p[0] + 1.0 - p[n - 1] >= obj.gap_floor() - 1e-15);
      } else {
        CHECK(p[0] >= 0.0 - 1e-15);
        CHECK(p[n - 1] <= 1.0 + 1e-15);
      }
      // Projection onto a convex set: <y - p, z - p> <= 0 for feasible z.
      const ArrayXd z = obj.project(sorted_uniforms(n, 0.2, 0.8, rng));
      CHECK(((y - p) * (z - p)).sum() <= 1e-10);
    }
  }
}

TEST_CASE("vanishing step size returns the datum") {
  Grid g = build_grid(Domain::truncated_line(8.0), 256);
  GridDensity rho = sample_normalized(ExactProfile::gaussian_heat(1), g, 0.5);
  SchemeParams prm{1.0, 1e-6, 1};
  JkoStepResult step = jko_step_1d(rho, prm);
  const QuantileFunction qmu = density_to_quantile(rho, step.quantile.resolution());
  CHECK(w2_quantile(step.quantile, qmu) <= 1e-3);
  CHECK(step.optimality_residual <= 1e-8);
}

TEST_CASE("heat step of a gaussian contracts to the exact scale factor") {
  // A centred gaussian stays gaussian under the scheme; its scale obeys
  // s' = (s + sqrt(s^2 + 4 tau)) / 2, so s = 1, tau = 0.1 gives the frozen
  // value below.
  const double tau = 0.1;
  const double s1 = 1.0916079783099616;
  Grid g = build_grid(Domain::truncated_line(12.0), 512);
  GridDensity rho = sample_normalized(ExactProfile::gaussian_heat(1), g, 0.5);
  SchemeParams prm{1.0, tau, 1};
  JkoStepResult step = jko_step_1d(rho, prm);

  const int N = step.quantile.resolution();
  double num = 0.0, den = 0.0;
  for (int j = 0; j < N; ++j) {
    const double z = standard_normal_quantile((j + 0.5) / N);
    num += step.quantile.samples[j] * z;
    den += z * z;
  }
  const double fitted = num / den;
  CHECK(fitted == doctest::Approx(s1).epsilon(1e-3));
  CHECK(step.optimality_residual <= 1e-5);

  // The iterate solves a strictly smaller objective than the datum itself.
  QuantileObjective obj(density_to_quantile(rho, N).samples, g.domain, prm);
  CHECK(step.objective < obj.value(obj.datum()));
}

TEST_CASE("porous-medium step tracks the self-similar profile") {
  const double tau = 1e-3;
  Grid g = build_grid(Domain::interval(-4.0, 4.0), 512);
  ExactProfile bb = ExactProfile::barenblatt_pme(2.0, 1);
  GridDensity rho = sample_normalized(bb, g, 1.0);
  SchemeParams prm{2.0, tau, 1};
  JkoStepResult step = jko_step_1d(rho, prm);
  GridDensity target = sample_normalized(bb, g, 1.0 + tau);
  const double l1 = ((step.rho_next.values - target.values).abs() * g.cell_volume).sum();
  CHECK(l1 <= 0.05);
  CHECK(step.optimality_residual <= 1e-4);
}

TEST_CASE("density bounds propagate on the circle") {
  Grid g = build_grid(Domain::torus1(), 128);
  ArrayXd v(128);
  for (int i = 0; i < 128; ++i) v[i] = 1.0 + 0.5 * std::cos(2.0 * kPi * g.center(0, i));
  GridDensity rho = GridDensity::normalized(g, v);
  for (double m : {1.0, 2.0, 0.8}) {
    SchemeParams prm{m, 1e-3, 1};
    JkoStepResult step = jko_step_1d(rho, prm);
    CHECK(step.rho_next.min() >= rho.min() - 1e-6);
    CHECK(step.rho_next.max() <= rho.max() + 1e-6);
    CHECK(step.rho_next.mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("scheme run produces decreasing energy and certified steps") {
  Grid g = build_grid(Domain::truncated_line(10.0), 256);
  GridDensity rho = sample_normalized(ExactProfile::gaussian_heat(1), g, 0.5);
  SchemeParams prm{1.0, 0.05, 1};
  auto steps = run_scheme_1d(rho, prm, 5, {});
  REQUIRE(steps.size() == 5);
  double prev_entropy = entropy(rho, 1.0);
  const double diam = g.domain.diameter();
  for (const auto& s : steps) {
    const double e = entropy(s.rho_next, 1.0);
    CHECK(e <= prev_entropy + 1e-12);
    prev_entropy = e;
    CHECK(s.rho_next.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.optimality_residual <= 1e-5);
    CHECK(quadratic_deviation_check(s.map, s.circulation_defect) <= 1e-8 * diam * diam);
    CHECK(stability_probe(s.quantile.samples, g.domain).minCoeff() > 0.0);
  }
}

TEST_CASE("torus heat flow relaxes a cosine perturbation toward uniform") {
  Grid g = build_grid(Domain::torus1(), 96);
  ArrayXd v(96);
  for (int i = 0; i < 96; ++i) v[i] = 1.0 + 0.3 * std::cos(2.0 * kPi * g.center(0, i));
  GridDensity rho = GridDensity::normalized(g, v);
  SchemeParams prm{1.0, 5e-3, 1};
  auto steps = run_scheme_1d(rho, prm, 8, {});
  // Heat kernel on the circle damps the first mode by exp(-4 pi^2 t).
  const double t = 8 * 5e-3;
  const double expect = 0.3 * std::exp(-4.0 * kPi * kPi * t);
  double amp = 0.0;
  const GridDensity& last = steps.back().rho_next;
  for (int i = 0; i < 96; ++i)
    amp += last.values[i] * std::cos(2.0 * kPi * g.center(0, i));
  amp *= 2.0 * g.cell_volume;
  CHECK(amp == doctest::Approx(expect).epsilon(0.08));
  for (const auto& s : steps) CHECK(s.optimality_residual <= 1e-5);
}

TEST_CASE("scheme runs are deterministic") {
  Grid g = build_grid(Domain::interval(-2.0, 2.0), 128);
  ArrayXd v(128);
  for (int i = 0; i < 128; ++i) v[i] = std::exp(-sqr(g.center(0, i)));
  GridDensity rho = GridDensity::normalized(g, v);
  SchemeParams prm{2.0, 0.01, 1};
  auto a = run_scheme_1d(rho, prm, 3, {});
  auto b = run_scheme_1d(rho, prm, 3, {});
  for (size_t k = 0; k < a.size(); ++k) {
    CHECK((a[k].quantile.samples == b[k].quantile.samples).all());
    CHECK((a[k].rho_next.values == b[k].rho_next.values).all());
  }
}

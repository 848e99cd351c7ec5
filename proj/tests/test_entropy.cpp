#include <cmath>

#include "doctest.h"
#include "jkolab/entropy.hpp"
#include "jkolab/profiles.hpp"

using namespace jkolab;

namespace {

// Independent check of the conjugate: golden-section maximization of
// z*s - f_m(z) over log z.
double conjugate_by_maximization(double s, double m) {
  auto g = [&](double logz) {
    const double z = std::exp(logz);
    return z * s - f_m(z, m);
  };
  double a = -40.0, b = 40.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 300; ++it) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + gr * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - gr * (b - a);
      g1 = g(x1);
    }
  }
  // z -> 0+ contributes 0 to the supremum for every m > 0.
  return std::max({g(0.5 * (a + b)), g(a), g(b), 0.0});
}

}  // namespace

TEST_CASE("energy integrand values") {
  CHECK(f_m(3.0, 2.0) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(f_m(4.0, 0.5) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(f_m(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f_m(0.0, 2.0) == 0.0);
  CHECK(f_m(0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(f_m(-1.0, 2.0), std::domain_error);
}

TEST_CASE("conjugate agrees with direct maximization") {
  // Includes the frozen case m=1/2, s=-1 -> 1.
  CHECK(f_m_conjugate(-1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  struct Case {
    double m, s;
  };
  const Case cases[] = {{2.0, 0.7},  {2.0, 2.5},  {1.5, 1.2},  {3.0, 0.9},
                        {0.5, -1.0}, {0.5, -0.3}, {0.7, -2.0}, {0.9, -0.8},
                        {1.0, 0.4},  {1.0, -1.1}};
  for (const Case& c : cases) {
    const double direct = conjugate_by_maximization(c.s, c.m);
    CHECK(f_m_conjugate(c.s, c.m) == doctest::Approx(direct).epsilon(1e-8));
  }
  // Divergent branch for fast diffusion at nonnegative slopes.
  CHECK(std::isinf(f_m_conjugate(0.5, 0.7)));
  // m > 1 at nonpositive slopes: sup at z=0.
  CHECK(f_m_conjugate(-2.0, 2.0) == 0.0);
}

TEST_CASE("Fenchel-Young inequality with equality at the derivative") {
  for (double m : {0.5, 0.7, 1.0, 1.5, 2.0, 3.0}) {
    for (double z : {0.05, 0.3, 1.0, 2.7, 9.0}) {
      const double s_eq = f_m_prime(z, m);
      const double defect = f_m(z, m) + f_m_conjugate(s_eq, m) - z * s_eq;
      CHECK(std::abs(defect) <= 1e-10 * (1.0 + std::abs(f_m(z, m))));
      // Inequality at slopes away from the touching one.
      for (double s : {s_eq - 0.8, s_eq + 0.7}) {
        const double gap = f_m(z, m) + f_m_conjugate(s, m) - z * s;
        CHECK(gap >= -1e-10);
      }
    }
  }
}

TEST_CASE("pressure matches central differences of the integrand") {
  for (double m : {0.7, 1.0, 1.3, 2.0}) {
    for (double z : {0.2, 1.0, 3.5}) {
      const double dz = 1e-5 * z;
      const double fd = (f_m(z + dz, m) - f_m(z - dz, m)) / (2.0 * dz);
      CHECK(f_m_prime(z, m) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  // Pressure drops the +1 of the entropy derivative at m=1.
  ArrayXd rho(3);
  rho << 0.5, 1.0, 2.0;
  ArrayXd p = pressure(rho, 1.0);
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p[0] == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  ArrayXd p2 = pressure(rho, 2.0);
  CHECK(p2[2] == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("entropy quadrature on uniform densities") {
  Grid g2 = build_grid(Domain::interval(0.0, 2.0), 64);
  GridDensity u2(g2, ArrayXd::Constant(64, 0.5));
  CHECK(entropy(u2, 1.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-13));

  Grid g1 = build_grid(Domain::interval(0.0, 1.0), 64);
  GridDensity u1(g1, ArrayXd::Constant(64, 1.0));
  CHECK(entropy(u1, 2.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("entropy of a sampled Gaussian matches the closed form") {
  Grid g = build_grid(Domain::truncated_line(10.0), 2048);
  GridDensity rho = sample_normalized(ExactProfile::gaussian_heat(1), g, 0.5);
  // sigma^2 = 2t = 1.
  // Midpoint quadrature plus cell-average bias are both O(h^2).
  CHECK(entropy(rho, 1.0) ==
        doctest::Approx(-std::log(std::sqrt(2.0 * kPi * std::exp(1.0)))).epsilon(1e-5));
}

TEST_CASE("entropy scaling identity") {
  // Frozen: m=2, d=1, uniform on [0,1], M=4: contraction doubles the energy.
  Grid g = build_grid(Domain::truncated_line(0.5), 64);  // box [-1/2, 1/2]
  GridDensity u(g, ArrayXd::Constant(64, 1.0));
  ScalingCheck sc = entropy_scaling_check(u, 4.0, 2.0);
  CHECK(sc.lhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sc.rhs == doctest::Approx(2.0).epsilon(1e-12));

  // m=1, d=1 Gaussian: additive (d/2) log M.
  Grid gl = build_grid(Domain::truncated_line(8.0), 1024);
  GridDensity rho = sample_normalized(ExactProfile::gaussian_heat(1), gl, 0.5);
  ScalingCheck s1 = entropy_scaling_check(rho, 4.0, 1.0);
  CHECK(s1.rhs == doctest::Approx(entropy(rho, 1.0) + 0.5 * std::log(4.0)).epsilon(1e-12));
  CHECK(s1.lhs == doctest::Approx(s1.rhs).epsilon(1e-10));
  CHECK(s1.rescaled.mass() == doctest::Approx(1.0).epsilon(1e-9));

  // 2D, m != 1, M < 1.
  Grid gp = build_grid(Domain::truncated_plane(6.0), {96, 96});
  GridDensity rho2 = sample_normalized(ExactProfile::gaussian_heat(2), gp, 0.5);
  ScalingCheck s2 = entropy_scaling_check(rho2, 0.25, 0.9);
  CHECK(s2.lhs == doctest::Approx(s2.rhs).epsilon(1e-10));

  // Only defined on truncations of unbounded domains.
  Grid gi = build_grid(Domain::interval(0.0, 1.0), 64);
  GridDensity ui(gi, ArrayXd::Constant(64, 1.0));
  CHECK_THROWS_AS(entropy_scaling_check(ui, 4.0, 2.0), std::invalid_argument);
}

TEST_CASE("scheme parameter validation") {
  Domain line = Domain::truncated_line(8.0);
  SchemeParams ok{0.7, 0.01, 1};
  ok.validate(line);
  CHECK_THROWS_AS((SchemeParams{-0.5, 0.01, 1}).validate(line), std::invalid_argument);
  CHECK_THROWS_AS((SchemeParams{1.0, 0.0, 1}).validate(line), std::invalid_argument);
  CHECK_THROWS_AS((SchemeParams{1.0, 0.01, 2}).validate(line), std::invalid_argument);
  // Truncated unbounded domains need finite second moments: m > 1 - 2/(d+2).
  CHECK_THROWS_AS((SchemeParams{0.3, 0.01, 1}).validate(line), std::invalid_argument);
  SchemeParams slow{0.3, 0.01, 1};
  slow.validate(Domain::interval(0.0, 1.0));  // bounded: only m > 1 - 2/d needed
  CHECK(m_crit_moment(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(m_crit_mass(2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m_crit_geodesic(2) == doctest::Approx(0.5).epsilon(1e-15));
}

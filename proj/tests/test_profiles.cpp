#include <cmath>

#include "doctest.h"
#include "jkolab/entropy.hpp"
#include "jkolab/profiles.hpp"

using namespace jkolab;

TEST_CASE("gaussian heat kernel values and moments") {
  ExactProfile g = ExactProfile::gaussian_heat(1);
  CHECK(g.value(0.0, 0.5) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-14));

  Grid grid = build_grid(Domain::truncated_line(10.0), 2048);
  GridDensity rho = sample_normalized(g, grid, 0.5);
  CHECK(rho.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rho.mean(0) == doctest::Approx(0.0).epsilon(1e-10));
  // Variance of the kernel at time t is 2t; cell averaging costs O(h^2).
  CHECK(rho.stddev(0) == doctest::Approx(1.0).epsilon(1e-4));

  ExactProfile g2 = ExactProfile::gaussian_heat(2, {0.5, -0.25});
  Grid grid2 = build_grid(Domain::truncated_plane(8.0), {256, 256});
  GridDensity rho2 = sample_normalized(g2, grid2, 0.25);
  CHECK(rho2.mean(0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(rho2.mean(1) == doctest::Approx(-0.25).epsilon(1e-8));
}

TEST_CASE("porous-medium amplitude against closed forms") {
  // d=1, m=2: A = 3^{1/3}/4; support radius at t=1 is sqrt(12 A).
  ExactProfile p = ExactProfile::barenblatt_pme(2.0, 1);
  CHECK(p.amplitude == doctest::Approx(std::cbrt(3.0) / 4.0).epsilon(1e-12));
  CHECK(p.beta == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(p.kappa == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(p.support_radius(1.0) ==
        doctest::Approx(std::sqrt(12.0 * p.amplitude)).epsilon(1e-12));

  // d=2, m=2: unit mass forces A = (8 pi)^{-1/2}.
  ExactProfile q = ExactProfile::barenblatt_pme(2.0, 2);
  CHECK(q.amplitude == doctest::Approx(1.0 / std::sqrt(8.0 * kPi)).epsilon(1e-10));

  // Mass round trip for a non-integer exponent.
  ExactProfile r = ExactProfile::barenblatt_pme(1.7, 1);
  CHECK(barenblatt_mass(1.7, 1, r.amplitude) == doctest::Approx(1.0).epsilon(1e-10));

  // Determinism of the bisection.
  ExactProfile p2 = ExactProfile::barenblatt_pme(2.0, 1);
  CHECK(p2.amplitude == p.amplitude);
}

TEST_CASE("fast-diffusion amplitude against closed forms") {
  // d=2, m=0.8: unit mass forces A = (3.2 pi)^{1/4}.
  ExactProfile f = ExactProfile::barenblatt_fde(0.8, 2);
  CHECK(f.amplitude == doctest::Approx(std::pow(3.2 * kPi, 0.25)).epsilon(1e-10));
  CHECK(std::isinf(f.support_radius(1.0)));

  ExactProfile f1 = ExactProfile::barenblatt_fde(0.7, 1);
  CHECK(barenblatt_mass(0.7, 1, f1.amplitude) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("self-similar time scaling of the profiles") {
  for (int pick = 0; pick < 2; ++pick) {
    ExactProfile pr = pick == 0 ? ExactProfile::barenblatt_pme(2.0, 1)
                                : ExactProfile::barenblatt_fde(0.7, 1);
    for (double t : {0.5, 1.0, 2.5}) {
      for (double x : {0.0, 0.3, 1.1}) {
        const double lhs = pr.value(x * std::pow(t, pr.beta), t);
        const double rhs = std::pow(t, -pr.dim * pr.beta) * pr.value(x, 1.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("support edge of the porous-medium profile") {
  ExactProfile p = ExactProfile::barenblatt_pme(2.0, 1);
  const double r = p.support_radius(1.0);
  CHECK(p.value(r, 1.0) == 0.0);
  CHECK(p.value(r + 0.1, 1.0) == 0.0);
  CHECK(p.value(r - 0.01, 1.0) > 0.0);
}

TEST_CASE("sampled cell averages keep unit mass") {
  // Support (radius ~2.08) sits inside the box, and cells straddling the
  // support edge are split at the kink, so raw mass is quadrature-exact.
  Grid g = build_grid(Domain::truncated_line(4.0), 512);
  ArrayXd avg = sample_cell_averages(ExactProfile::barenblatt_pme(2.0, 1), g, 1.0);
  CHECK((avg * g.cell_volume).sum() == doctest::Approx(1.0).epsilon(1e-12));

  // Fast diffusion has algebraic tails; the box is sized so they are < 1e-8.
  Grid gf = build_grid(Domain::truncated_line(80.0), 4096);
  ArrayXd avgf = sample_cell_averages(ExactProfile::barenblatt_fde(0.7, 1), gf, 1.0);
  CHECK((avgf * gf.cell_volume).sum() == doctest::Approx(1.0).epsilon(1e-7));

  Grid g2 = build_grid(Domain::truncated_plane(4.0), {192, 192});
  ArrayXd avg2 = sample_cell_averages(ExactProfile::barenblatt_pme(2.0, 2), g2, 1.0);
  CHECK((avg2 * g2.cell_volume).sum() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("discrete Laplacian of sampled pressure is -alpha/t inside support") {
  // Cell averages of a parabola shift it by a constant, so the 3-point
  // Laplacian is exact on strictly interior cells.
  ExactProfile p = ExactProfile::barenblatt_pme(2.0, 1);
  Grid g = build_grid(Domain::truncated_line(4.0), 512);
  ArrayXd rho = sample_cell_averages(p, g, 1.0);
  ArrayXd pr = pressure(rho, 2.0);
  const double r_in = 0.8 * p.support_radius(1.0);
  const double expect = -p.alpha();  // alpha = d*beta = 1/3 at t=1
  int tested = 0;
  for (int i = 1; i + 1 < g.size; ++i) {
    const double x = g.center(0, i);
    if (std::abs(x) > r_in) continue;
    const double lap = (pr[i - 1] - 2.0 * pr[i] + pr[i + 1]) / (g.h[0] * g.h[0]);
    CHECK(lap == doctest::Approx(expect).epsilon(1e-9));
    ++tested;
  }
  CHECK(tested > 100);
}

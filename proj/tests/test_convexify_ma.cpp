#include <cmath>
#include <random>

#include "doctest.h"
#include "jkolab/convexify.hpp"
#include "jkolab/ma_measure.hpp"

using namespace jkolab;

namespace {

// Random positive-definite quadratic plus a few hinge planes: strictly convex
// with subdifferential polygons of varied shape.
ArrayXd random_convex_samples(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ev(0.4, 3.0), ang(0.0, kPi), co(-1.0, 1.0);
  const double l1 = ev(rng), l2 = ev(rng), th = ang(rng);
  const double c = std::cos(th), s = std::sin(th);
  const double a11 = c * c * l1 + s * s * l2;
  const double a22 = s * s * l1 + c * c * l2;
  const double a12 = c * s * (l1 - l2);
  ArrayXd u(g.size);
  std::array<std::array<double, 3>, 3> planes;
  for (auto& p : planes) p = {co(rng), co(rng), 0.3 * co(rng)};
  for (int i = 0; i < g.size; ++i) {
    const Vector2d x = g.center2(i);
    double v = 0.5 * (a11 * x.x() * x.x() + 2.0 * a12 * x.x() * x.y() + a22 * x.y() * x.y());
    for (const auto& p : planes) v += 0.4 * std::max(0.0, p[0] * x.x() + p[1] * x.y() + p[2]);
    u[i] = v;
  }
  return u;
}

}  // namespace

TEST_CASE("1d envelope passes through convex data and is idempotent") {
  const Grid g = build_grid(Domain::interval(-1.0, 1.0), 64);
  ArrayXd u(g.size);
  for (int i = 0; i < g.size; ++i) u[i] = 0.5 * g.center(0, i) * g.center(0, i);
  const ConvexPotential cp = convexify(g, u);
  CHECK(cp.delta_conv == 0.0);
  CHECK((cp.values - u).abs().maxCoeff() == 0.0);

  const ConvexPotential again = convexify(g, cp.values);
  CHECK(again.delta_conv <= 1e-12);
}

TEST_CASE("1d envelope of a concave arc is its chord") {
  const Grid g = build_grid(Domain::interval(-1.0, 1.0), 101);
  ArrayXd u(g.size);
  for (int i = 0; i < g.size; ++i) u[i] = -sqr(g.center(0, i));
  const ConvexPotential cp = convexify(g, u);
  const double edge = g.center(0, g.size - 1);  // envelope is the constant chord level
  CHECK(cp.delta_conv == doctest::Approx(edge * edge).epsilon(1e-12));
  for (int i = 0; i < g.size; ++i) CHECK(cp.values[i] == doctest::Approx(-edge * edge));
}

TEST_CASE("2d envelope leaves convex data alone and drops below dents") {
  const Grid g = build_grid(Domain::box2(-1.0, 1.0, -1.0, 1.0), 16);
  std::mt19937_64 rng(11);
  const ArrayXd u = random_convex_samples(g, rng);
  const ConvexPotential cp = convexify(g, u);
  CHECK(cp.delta_conv <= 1e-9);

  ArrayXd dented = u;
  for (int i = 0; i < g.size; ++i) {
    const Vector2d x = g.center2(i);
    dented[i] += 0.5 * std::exp(-8.0 * x.squaredNorm());  // upward bump is non-convex
  }
  const ConvexPotential cd = convexify(g, dented);
  CHECK(cd.delta_conv > 0.05);
  CHECK((cd.values <= dented + 1e-12).all());
  const ConvexPotential cdd = convexify(g, cd.values);
  CHECK(cdd.delta_conv <= 1e-9);
}

TEST_CASE("periodic lift shifts values by the affine seam correction") {
  const Grid g = build_grid(Domain::torus1(), 32);
  ConvexPotential cp;
  cp.grid = g;
  cp.values = ArrayXd(g.size);
  for (int i = 0; i < g.size; ++i) {
    const double x = g.center(0, i);
    cp.values[i] = 0.5 * x * x + 0.01 * std::cos(2.0 * kPi * x);
  }
  const double L = 1.0;
  for (int i : {0, 5, 31}) {
    const double x = g.center(0, i);
    CHECK(cp.lifted(i + 32) == doctest::Approx(cp.lifted(i) + L * x + 0.5 * L * L));
    CHECK(cp.lifted(i - 32) == doctest::Approx(cp.lifted(i) - L * x + 0.5 * L * L));
  }
}

TEST_CASE("1d measure of a parabola is lebesgue with no atoms") {
  const Grid g = build_grid(Domain::interval(-1.0, 1.0), 128);
  ArrayXd u(g.size);
  for (int i = 0; i < g.size; ++i) u[i] = 0.5 * g.center(0, i) * g.center(0, i);
  const MongeAmpereMeasure mu = ma_measure_1d(convexify(g, u));
  CHECK(mu.atoms.empty());
  for (int i = 1; i < g.size - 1; ++i)
    CHECK(mu.cell_mass[i] == doctest::Approx(g.h[0]).epsilon(1e-10));
  CHECK(mu.cell_mass[0] == 0.0);  // boundary cells carry no mass
}

TEST_CASE("slope kinks concentrate into atoms") {
  const Grid ga = build_grid(Domain::interval(-1.0, 1.0), 255);  // odd count: 0 is a center
  ArrayXd ua(ga.size);
  for (int i = 0; i < ga.size; ++i) ua[i] = std::abs(ga.center(0, i));
  const MongeAmpereMeasure ma = ma_measure_1d(convexify(ga, ua));
  REQUIRE(ma.atoms.size() == 1);
  CHECK(ma.atoms[0].point.x() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ma.atoms[0].mass == doctest::Approx(2.0));

  const Grid gb = build_grid(Domain::interval(0.0, 1.0), 5);  // centers hit 0.3 exactly
  ArrayXd ub(gb.size);
  for (int i = 0; i < gb.size; ++i) ub[i] = std::max(0.0, gb.center(0, i) - 0.3);
  const MongeAmpereMeasure mb = ma_measure_1d(convexify(gb, ub));
  REQUIRE(mb.atoms.size() == 1);
  CHECK(mb.atoms[0].point.x() == doctest::Approx(0.3));
  CHECK(mb.atoms[0].mass == doctest::Approx(1.0));
}

TEST_CASE("affine shifts leave the 1d measure fixed") {
  const Grid g = build_grid(Domain::interval(-2.0, 2.0), 64);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> co(-1.0, 1.0);
  ArrayXd u(g.size);
  for (int i = 0; i < g.size; ++i) {
    const double x = g.center(0, i);
    u[i] = 0.7 * x * x + 0.5 * std::abs(x - 0.3);
  }
  ArrayXd shifted = u;
  const double a = co(rng), b = co(rng);
  for (int i = 0; i < g.size; ++i) shifted[i] += a * g.center(0, i) + b;
  const MongeAmpereMeasure m0 = ma_measure_1d(convexify(g, u));
  const MongeAmpereMeasure m1 = ma_measure_1d(convexify(g, shifted));
  for (int i = 0; i < g.size; ++i) CHECK(m1.cell_mass[i] == doctest::Approx(m0.cell_mass[i]).epsilon(1e-12));
}

TEST_CASE("2d vertex masses of a paraboloid tile the plane") {
  const Grid g = build_grid(Domain::box2(-1.0, 1.0, -1.0, 1.0), 20);
  ArrayXd u(g.size);
  for (int i = 0; i < g.size; ++i) u[i] = 0.5 * g.center2(i).squaredNorm();
  const MongeAmpereMeasure mu = ma_measure_2d(convexify(g, u));
  const double vol = g.cell_volume;
  const CellWindow w = interior_window(g, 1);
  for (int j = w.j0; j <= w.j1; ++j)
    for (int i = w.i0; i <= w.i1; ++i)
      CHECK(mu.cell_mass[g.index(i, j)] == doctest::Approx(vol).epsilon(1e-9));

  // additivity: split the window into quarters
  const int mi = (w.i0 + w.i1) / 2, mj = (w.j0 + w.j1) / 2;
  const double parts = mu.window_mass({w.i0, mi, w.j0, mj}) + mu.window_mass({mi + 1, w.i1, w.j0, mj}) +
                       mu.window_mass({w.i0, mi, mj + 1, w.j1}) + mu.window_mass({mi + 1, w.i1, mj + 1, w.j1});
  CHECK(parts == doctest::Approx(mu.window_mass(w)).epsilon(1e-12));
}

TEST_CASE("linear gradient maps scale masses by the determinant") {
  const Grid g = build_grid(Domain::box2(-1.0, 1.0, -1.0, 1.0), 14);
  const double a11 = 1.3, a12 = 0.4, a22 = 0.8;
  const double det = a11 * a22 - a12 * a12;
  ArrayXd u(g.size);
  for (int i = 0; i < g.size; ++i) {
    const Vector2d x = g.center2(i);
    u[i] = 0.5 * (a11 * x.x() * x.x() + 2.0 * a12 * x.x() * x.y() + a22 * x.y() * x.y());
  }
  const MongeAmpereMeasure mu = ma_measure_2d(convexify(g, u));
  const CellWindow w = interior_window(g, 1);
  for (int j = w.j0; j <= w.j1; ++j)
    for (int i = w.i0; i <= w.i1; ++i)
      CHECK(mu.cell_mass[g.index(i, j)] == doctest::Approx(det * g.cell_volume).epsilon(1e-9));
}

TEST_CASE("all mass of a cone sits at its apex") {
  const Grid g = build_grid(Domain::box2(-1.0, 1.0, -1.0, 1.0), 11);  // odd: 0 is a center
  ArrayXd u(g.size);
  for (int i = 0; i < g.size; ++i) {
    const Vector2d x = g.center2(i);
    u[i] = std::max(std::abs(x.x()), std::abs(x.y()));
  }
  const MongeAmpereMeasure mu = ma_measure_2d(convexify(g, u));
  const int apex = g.index(5, 5);
  CHECK(mu.cell_mass[apex] == doctest::Approx(2.0));  // hull of the four axis gradients
  const CellWindow w = interior_window(g, 1);
  CHECK(mu.window_mass(w) == doctest::Approx(2.0).epsilon(1e-9));
  REQUIRE(mu.atoms.size() == 1);
  CHECK(mu.atoms[0].point.norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("determinant bound certificates") {
  const Grid g = build_grid(Domain::interval(-1.0, 1.0), 64);
  ArrayXd half(g.size), quarter(g.size);
  for (int i = 0; i < g.size; ++i) {
    const double x = g.center(0, i);
    half[i] = 0.5 * x * x;
    quarter[i] = 0.25 * x * x;
  }
  const CellWindow w = interior_window(g, 1);
  const MaBoundReport ok = ma_lower_bound_check(convexify(g, half), 1.0, w);
  CHECK(ok.ok);
  CHECK(ok.worst_ratio == doctest::Approx(1.0).epsilon(1e-9));

  const MaBoundReport bad = ma_lower_bound_check(convexify(g, quarter), 0.6, w);
  CHECK_FALSE(bad.ok);
  CHECK(bad.worst_ratio == doctest::Approx(0.5 / 0.6).epsilon(1e-9));
}

TEST_CASE("weak laplacian certificates") {
  const Grid g2 = build_grid(Domain::box2(-1.0, 1.0, -1.0, 1.0), 16);
  ArrayXd u2(g2.size);
  for (int i = 0; i < g2.size; ++i) u2[i] = 0.5 * g2.center2(i).squaredNorm();
  const WeakLaplaceReport r2 = amgm_subharmonic_check(convexify(g2, u2), 1.0, interior_window(g2, 1));
  CHECK(r2.ok);
  CHECK(r2.margin == doctest::Approx(0.0).epsilon(1e-9));

  const Grid g1 = build_grid(Domain::interval(-1.0, 1.0), 65);
  ArrayXd u1(g1.size);
  for (int i = 0; i < g1.size; ++i) u1[i] = std::abs(g1.center(0, i));
  const WeakLaplaceReport r1 = amgm_subharmonic_check(convexify(g1, u1), 0.0, interior_window(g1, 1));
  CHECK(r1.ok);
  CHECK(r1.margin >= -1e-12);  // the atom only helps, up to roundoff
}

TEST_CASE("measure bound implies the weak laplacian bound") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 6; ++trial) {
    const Grid g = build_grid(Domain::box2(-1.0, 1.0, -1.0, 1.0), 12 + 2 * trial);
    const ConvexPotential cp = convexify(g, random_convex_samples(g, rng));
    const CellWindow w = interior_window(g, 1);
    const MongeAmpereMeasure mu = ma_measure_2d(cp, 1e300);
    double min_mass = 1e300;
    for (int j = w.j0; j <= w.j1; ++j)
      for (int i = w.i0; i <= w.i1; ++i) min_mass = std::min(min_mass, mu.cell_mass[g.index(i, j)]);
    const double lambda = std::sqrt(min_mass / g.cell_volume) * (1.0 - 1e-12);
    CHECK(ma_lower_bound_check(cp, lambda, w).ok);
    const WeakLaplaceReport weak = amgm_subharmonic_check(cp, lambda, w);
    CHECK(weak.ok);
  }
}

TEST_CASE("perturbations move window masses proportionally") {
  const Grid g = build_grid(Domain::box2(-1.0, 1.0, -1.0, 1.0), 16);
  std::mt19937_64 rng(7);
  const ArrayXd u = random_convex_samples(g, rng);
  const CellWindow w = interior_window(g, 1);
  const double base = ma_measure_2d(convexify(g, u)).window_mass(w);
  const double eta = 1e-4;
  ArrayXd v = u;
  for (int i = 0; i < g.size; ++i) v[i] += eta * std::exp(-4.0 * g.center2(i).squaredNorm());
  const double moved = ma_measure_2d(convexify(g, v)).window_mass(w);
  CHECK(std::abs(moved - base) <= 1e-3);
}

TEST_CASE("hull and plane-search masses agree") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const Grid g = build_grid(Domain::box2(-1.0, 1.0, -1.0, 1.0), 10);
    const ConvexPotential cp = convexify(g, random_convex_samples(g, rng));
    const MongeAmpereMeasure mu = ma_measure_2d(cp, 1e300);
    const ArrayXd oracle = plane_search_vertex_masses(cp, 1500);
    const CellWindow w = interior_window(g, 1);
    const double mean = mu.window_mass(w) / w.count();
    for (int j = w.j0; j <= w.j1; ++j) {
      for (int i = w.i0; i <= w.i1; ++i) {
        const int c = g.index(i, j);
        const double tol = 0.02 * std::max({mu.cell_mass[c], oracle[c], mean});
        CHECK(std::abs(mu.cell_mass[c] - oracle[c]) <= tol);
      }
    }
  }
}

#include "doctest.h"
#include "jkolab/density.hpp"
#include "jkolab/domain.hpp"

using namespace jkolab;

TEST_CASE("cell centers and volumes") {
  Grid g = build_grid(Domain::interval(0.0, 1.0), 8);
  CHECK(g.h[0] == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(g.center(0, 0) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(g.center(0, 7) == doctest::Approx(0.9375).epsilon(1e-15));
  CHECK(g.cell_volume == doctest::Approx(0.125).epsilon(1e-15));

  Grid t = build_grid(Domain::torus2(), {16, 16});
  CHECK(t.size == 256);
  CHECK(t.cell_volume == doctest::Approx(1.0 / 256).epsilon(1e-15));
  // Indexing round trip, x fastest.
  CHECK(t.index(3, 5) == 3 + 16 * 5);
  CHECK(t.ix(83) == 3);
  CHECK(t.iy(83) == 5);
}

TEST_CASE("grid rejects fewer than 4 cells per axis") {
  CHECK_THROWS_AS(build_grid(Domain::interval(0.0, 1.0), 3), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(Domain::torus2(), {8, 3}), std::invalid_argument);
}

TEST_CASE("boundary classification on the unit square, n=4") {
  Grid g = build_grid(Domain::square(), {4, 4});
  BoundaryClassification bc = classify_boundary(g);
  CHECK(bc.count(CellClass::Corner) == 4);
  CHECK(bc.count(CellClass::Face) == 8);
  CHECK(bc.count(CellClass::Interior) == 4);
  // Outward normals on the four mid-side cells.
  CHECK(bc.tag[g.index(1, 0)] == CellClass::Face);
  CHECK(bc.normal[g.index(1, 0)] == std::array<int, 2>{0, -1});
  CHECK(bc.normal[g.index(3, 2)] == std::array<int, 2>{1, 0});
  CHECK(bc.normal[g.index(0, 1)] == std::array<int, 2>{-1, 0});
  CHECK(bc.normal[g.index(2, 3)] == std::array<int, 2>{0, 1});
}

TEST_CASE("torus has no boundary cells; interval ends are corners") {
  Grid t = build_grid(Domain::torus2(), {8, 8});
  CHECK(classify_boundary(t).count(CellClass::Interior) == 64);

  Grid i = build_grid(Domain::interval(-1.0, 1.0), 8);
  BoundaryClassification bc = classify_boundary(i);
  CHECK(bc.count(CellClass::Corner) == 2);
  CHECK(bc.tag[0] == CellClass::Corner);
  CHECK(bc.tag[7] == CellClass::Corner);
  CHECK(bc.count(CellClass::Interior) == 6);
}

TEST_CASE("periodic index wrap") {
  Grid t = build_grid(Domain::torus1(), 8);
  CHECK(t.wrap(0, -1) == 7);
  CHECK(t.wrap(0, 8) == 0);
  CHECK(t.wrap(0, 17) == 1);
  Grid i = build_grid(Domain::interval(0.0, 1.0), 8);
  CHECK_THROWS_AS(i.wrap(0, -1), std::out_of_range);
}

TEST_CASE("grid density validates mass and sign") {
  Grid g = build_grid(Domain::interval(0.0, 2.0), 16);
  ArrayXd v = ArrayXd::Constant(16, 0.5);
  GridDensity d(g, v);
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(GridDensity(g, ArrayXd::Constant(16, 0.6)), std::invalid_argument);
  ArrayXd neg = v;
  neg[3] = -0.1;
  CHECK_THROWS_AS(GridDensity(g, neg), std::invalid_argument);
  GridDensity r = GridDensity::normalized(g, ArrayXd::Constant(16, 7.0));
  CHECK(r.mass() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("domain factories and validation") {
  CHECK_THROWS_AS(Domain::interval(1.0, 1.0), std::invalid_argument);
  Domain tl = Domain::truncated_plane(8.0);
  CHECK(tl.dim == 2);
  CHECK_FALSE(tl.physical_boundary());
  CHECK(Domain::square().physical_boundary());
  CHECK(Domain::torus1().is_periodic());
  CHECK(Domain::truncated_half_line(5.0).lo[0] == 0.0);
  CHECK(Domain::truncated_quarter_plane(5.0).lo[1] == 0.0);
}

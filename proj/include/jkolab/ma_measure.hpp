#pragma once

#include <vector>

#include "jkolab/convexify.hpp"
#include "jkolab/domain.hpp"
#include "jkolab/types.hpp"

namespace jkolab {

// Inclusive cell-index rectangle; 1D windows keep j0 = j1 = 0.
struct CellWindow {
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;

  bool contains(int ix, int iy) const { return ix >= i0 && ix <= i1 && iy >= j0 && iy <= j1; }
  int count() const { return (i1 - i0 + 1) * (j1 - j0 + 1); }
};

// Largest window staying the given number of cells away from every
// non-periodic boundary; the whole grid on a torus.
CellWindow interior_window(const Grid& grid, int halo = 1);

struct MassAtom {
  Vector2d point;
  double mass = 0.0;
};

// Distribution of subdifferential volume of the triangulated interpolant:
// cell c carries the measure attached to its center vertex. Cells bordering a
// non-periodic boundary carry zero; their subdifferentials are truncated.
struct MongeAmpereMeasure {
  Grid grid;
  ArrayXd cell_mass;
  std::vector<MassAtom> atoms;  // vertices whose mass reaches the threshold

  double window_mass(const CellWindow& w) const;
  double total() const { return cell_mass.sum(); }
};

// d=1: vertex mass is the increment of the one-sided slopes across it.
MongeAmpereMeasure ma_measure_1d(const ConvexPotential& u, double atom_threshold = 0.05);

// d=2: vertex mass is the area of the subdifferential polygon, the set of
// slopes whose supporting plane at the vertex stays below every other sample.
// Computed by clipping the one-sided difference box with one halfplane per
// sample; by polarity this equals the hull of the gradients of the facets
// incident to the vertex on the lower hull of the graph.
MongeAmpereMeasure ma_measure_2d(const ConvexPotential& u, double atom_threshold = 0.05);

// Independent slope-space estimate for cross-checks on small grids: sweep a
// lattice of slopes g and attribute each to the vertex minimizing u - g.x,
// the touching point of the supporting plane of slope g. No hull geometry is
// involved, so the result checks the incident-gradient construction.
ArrayXd plane_search_vertex_masses(const ConvexPotential& u, int lattice_per_axis = 400);

struct MaBoundReport {
  bool ok = true;
  int worst_cell = -1;
  double worst_ratio = 0.0;  // min over the window of mass / (lambda^d vol)
  double slack = 0.0;        // convexification + roundoff allowance
};

// Certifies cell mass >= lambda^d * cell volume - slack on the window: the
// determinant bound det D^2 u >= lambda^d in the measure sense.
MaBoundReport ma_lower_bound_check(const ConvexPotential& u, double lambda,
                                   const CellWindow& window);

struct WeakLaplaceReport {
  bool ok = true;
  double margin = 0.0;  // min over bumps of <u, lap phi> / <phi> - d * lambda
  double slack = 0.0;
};

// Weak subharmonicity lap u >= d * lambda against tensor hat bumps of widths
// 1..3 centered at window cells, supports kept inside the window. Implied by
// the measure bound: the axis second differences at a vertex dominate the
// bounding box of its subdifferential polygon, and the box area dominates
// the polygon area, so trace >= d * (mass/vol)^(1/d) cellwise.
WeakLaplaceReport amgm_subharmonic_check(const ConvexPotential& u, double lambda,
                                         const CellWindow& window);

// Same weak test for an arbitrary cell field: min over the hat bumps of
// <values, lap phi> / <phi>, compared against `bound`. Periodic axes wrap the
// field plainly, with no quadratic lift; margin = min - bound and the check
// tolerates extra_slack on top of a roundoff guard scaled to |values| / h^2.
WeakLaplaceReport weak_laplace_check(const Grid& grid, const ArrayXd& values, double bound,
                                     const CellWindow& window, double extra_slack = 0.0);

}  // namespace jkolab

#pragma once

#include "jkolab/domain.hpp"

namespace jkolab {

// Probability density sampled on grid cells. Values are densities (not
// masses): sum(values) * cell_volume == 1 up to the construction tolerance.
struct GridDensity {
  Grid grid;
  ArrayXd values;

  GridDensity() = default;
  // Validating constructor: checks size, nonnegativity, and unit mass within
  // mass_tol. Use `normalized` to rescale instead of failing.
  GridDensity(Grid g, ArrayXd v, double mass_tol = 1e-9);

  // Rescales v to exact unit mass; fails only on nonpositive total mass.
  static GridDensity normalized(Grid g, ArrayXd v);
  // No validation; for internal construction paths that conserve mass exactly.
  static GridDensity unchecked(Grid g, ArrayXd v);

  double mass() const { return values.sum() * grid.cell_volume; }
  double min() const { return values.minCoeff(); }
  double max() const { return values.maxCoeff(); }
  double second_moment() const;  // mass-weighted mean of |x|^2
  double mean(int axis) const;
  double stddev(int axis) const;
};

}  // namespace jkolab

#pragma once

#include "jkolab/density.hpp"

namespace jkolab {

// Sampled inverse CDF at the midpoint ranks s_j = (j+1/2)/N. W2 between two
// densities is the l2 distance between their sample vectors, which makes this
// the exact 1D transport coordinate.
struct QuantileFunction {
  ArrayXd samples;  // nondecreasing

  int resolution() const { return static_cast<int>(samples.size()); }
};

// Left-continuous inverse of the piecewise-linear CDF of rho.
QuantileFunction density_to_quantile(const GridDensity& rho, int N);

// Rebuilds a cellwise density from monotone samples: mass 1/N spread uniformly
// between consecutive samples, endpoint chunks of mass 1/(2N) extrapolated at
// half the neighbor gap and clamped into the domain. Total mass is exactly 1.
GridDensity quantile_to_density(const QuantileFunction& q, const Grid& grid);

// Periodic variant: the two endpoint chunks share the wrap gap
// q[0] + L - q[N-1], closing the circle seamlessly.
GridDensity quantile_to_density_torus(const QuantileFunction& q, const Grid& grid);

// sqrt of the mean squared sample difference: the exact W2 of the sampled
// measures.
double w2_quantile(const QuantileFunction& a, const QuantileFunction& b);

}  // namespace jkolab

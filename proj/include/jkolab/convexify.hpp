#pragma once

#include "jkolab/domain.hpp"
#include "jkolab/types.hpp"

namespace jkolab {

// Convex function sampled at cell centers. On periodic domains the samples
// are of the lifted function u(x) = |x|^2/2 + per(x) with per periodic; the
// lift extends u to the whole line or plane, so convexity across the seam is
// meaningful. lifted() evaluates at arbitrary integer cell offsets, adding
// the affine difference of |x|^2/2 between a point and its representative.
struct ConvexPotential {
  Grid grid;
  ArrayXd values;
  bool convexified = false;
  double delta_conv = 0.0;  // largest downward adjustment made by convexify

  double lifted(int ix, int iy = 0) const;
};

// Lower convex envelope of the samples, evaluated at the sample points: the
// largest convex function below the data. 1D builds the lower hull of
// (x_i, u_i); 2D maximizes the supporting plane a.x + b <= u_j at every
// sample by a randomized fixed-dimension LP over all sample constraints.
// Periodic data is tiled once around the fundamental window through the
// lift, which covers every supporting plane with gradient in the data range.
ConvexPotential convexify(const Grid& grid, const ArrayXd& u_raw);

}  // namespace jkolab

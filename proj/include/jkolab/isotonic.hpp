#pragma once

#include "jkolab/types.hpp"

namespace jkolab {

// Euclidean projection onto the cone of nondecreasing vectors
// (pool-adjacent-violators, O(n)).
ArrayXd isotonic_fit(const ArrayXd& y);

// Projection onto {nondecreasing, lo <= x_i <= hi}. Clipping the cone
// projection is exact for constant bounds.
ArrayXd isotonic_fit_bounded(const ArrayXd& y, double lo, double hi);

// Projection onto {nondecreasing, x_last - x_first <= max_range}, used for
// periodic quantile vectors whose total increase cannot exceed the period.
// Solved by bisection on the multiplier of the single range constraint.
ArrayXd isotonic_fit_range_limited(const ArrayXd& y, double max_range);

}  // namespace jkolab

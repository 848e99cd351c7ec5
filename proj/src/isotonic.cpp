#include "jkolab/isotonic.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace jkolab {

ArrayXd isotonic_fit(const ArrayXd& y) {
  const int n = static_cast<int>(y.size());
  if (n == 0) return y;
  // Stack of merged blocks (mean, count).
  std::vector<double> mean(n);
  std::vector<int> count(n);
  int top = 0;
  for (int i = 0; i < n; ++i) {
    double m = y[i];
    int c = 1;
    while (top > 0 && mean[top - 1] > m) {
      m = (m * c + mean[top - 1] * count[top - 1]) / (c + count[top - 1]);
      c += count[top - 1];
      --top;
    }
    mean[top] = m;
    count[top] = c;
    ++top;
  }
  ArrayXd x(n);
  int pos = 0;
  for (int b = 0; b < top; ++b)
    for (int k = 0; k < count[b]; ++k) x[pos++] = mean[b];
  return x;
}

ArrayXd isotonic_fit_bounded(const ArrayXd& y, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("isotonic bounds must satisfy lo <= hi");
  return isotonic_fit(y).min(hi).max(lo);
}

ArrayXd isotonic_fit_range_limited(const ArrayXd& y, double max_range) {
  if (!(max_range >= 0.0)) throw std::invalid_argument("range limit must be nonnegative");
  ArrayXd x = isotonic_fit(y);
  const int n = static_cast<int>(x.size());
  if (n < 2 || x[n - 1] - x[0] <= max_range) return x;
  // The range constraint couples only the endpoints, so the constrained
  // projection is the cone projection of y + lambda*(e_0 - e_{n-1}) for the
  // multiplier lambda >= 0 that makes the constraint active. The range is
  // continuous and nonincreasing in lambda, so bisect.
  auto attempt = [&](double lam) {
    ArrayXd z = y;
    z[0] += lam;
    z[n - 1] -= lam;
    return isotonic_fit(z);
  };
  double lo = 0.0;
  double hi = 1.0;
  while (true) {
    ArrayXd z = attempt(hi);
    if (z[n - 1] - z[0] <= max_range) break;
    hi *= 2.0;
    if (hi > 1e18) throw std::runtime_error("range-limited isotonic fit failed to bracket");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    ArrayXd z = attempt(mid);
    if (z[n - 1] - z[0] <= max_range)
      hi = mid;
    else
      lo = mid;
  }
  return attempt(hi);
}

}  // namespace jkolab

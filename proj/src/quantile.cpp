#include "jkolab/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jkolab {

namespace {

void check_1d(const Grid& grid) {
  if (grid.dim() != 1) throw std::invalid_argument("quantile transforms are 1D only");
}

// Deposits mass uniformly over [a,b] (already inside [lo,hi]) into cells.
void deposit_uniform(ArrayXd& cell_mass, const Grid& grid, double a, double b,
                     double mass) {
  const double lo = grid.domain.lo[0];
  const double h = grid.h[0];
  const int n = grid.n[0];
  if (b - a < 1e-300) {
    int i = static_cast<int>(std::floor((0.5 * (a + b) - lo) / h));
    i = std::clamp(i, 0, n - 1);
    cell_mass[i] += mass;
    return;
  }
  int i0 = std::clamp(static_cast<int>(std::floor((a - lo) / h)), 0, n - 1);
  int i1 = std::clamp(static_cast<int>(std::floor((b - lo) / h)), 0, n - 1);
  const double inv_len = 1.0 / (b - a);
  for (int i = i0; i <= i1; ++i) {
    const double ov = std::min(b, grid.edge(0, i + 1)) - std::max(a, grid.edge(0, i));
    if (ov > 0.0) cell_mass[i] += mass * ov * inv_len;
  }
}

// Same, but [a,b] may stick out of the fundamental interval; wraps around.
void deposit_wrapped(ArrayXd& cell_mass, const Grid& grid, double a, double b,
                     double mass) {
  const double lo = grid.domain.lo[0];
  const double hi = grid.domain.hi[0];
  const double L = hi - lo;
  const double shift = std::floor((a - lo) / L) * L;
  a -= shift;
  b -= shift;
  if (b <= hi) {
    deposit_uniform(cell_mass, grid, a, b, mass);
  } else {
    const double w1 = (hi - a) / (b - a);
    deposit_uniform(cell_mass, grid, a, hi, mass * w1);
    deposit_uniform(cell_mass, grid, lo, b - L, mass * (1.0 - w1));
  }
}

}  // namespace

QuantileFunction density_to_quantile(const GridDensity& rho, int N) {
  check_1d(rho.grid);
  if (N < 2) throw std::invalid_argument("quantile resolution must be >= 2");
  const Grid& g = rho.grid;
  const int n = g.n[0];
  const double h = g.h[0];
  ArrayXd F(n + 1);
  F[0] = 0.0;
  for (int i = 0; i < n; ++i) F[i + 1] = F[i] + rho.values[i] * h;
  if (!(F[n] > 0.0)) throw std::invalid_argument("density has no mass");
  F /= F[n];

  ArrayXd q(N);
  int i = 0;
  for (int j = 0; j < N; ++j) {
    const double s = (j + 0.5) / N;
    while (i + 1 < n && F[i + 1] < s) ++i;
    const double slope = (F[i + 1] - F[i]) / h;
    double pos;
    if (slope > 1e-300)
      pos = g.edge(0, i) + (s - F[i]) / slope;
    else
      pos = g.edge(0, i);
    q[j] = std::clamp(pos, g.edge(0, i), g.edge(0, i + 1));
  }
  return QuantileFunction{q};
}

GridDensity quantile_to_density(const QuantileFunction& qf, const Grid& grid) {
  check_1d(grid);
  const ArrayXd& q = qf.samples;
  const int N = qf.resolution();
  if (N < 2) throw std::invalid_argument("need at least two quantile samples");
  const double lo = grid.domain.lo[0];
  const double hi = grid.domain.hi[0];
  ArrayXd cell_mass = ArrayXd::Zero(grid.size);
  const double w = 1.0 / N;
  for (int j = 0; j + 1 < N; ++j) {
    const double a = std::clamp(q[j], lo, hi);
    const double b = std::clamp(q[j + 1], lo, hi);
    deposit_uniform(cell_mass, grid, a, b, w);
  }
  const double b0 = std::clamp(q[0] - 0.5 * (q[1] - q[0]), lo, hi);
  const double bN = std::clamp(q[N - 1] + 0.5 * (q[N - 1] - q[N - 2]), lo, hi);
  deposit_uniform(cell_mass, grid, b0, std::clamp(q[0], lo, hi), 0.5 * w);
  deposit_uniform(cell_mass, grid, std::clamp(q[N - 1], lo, hi), bN, 0.5 * w);
  return GridDensity::unchecked(grid, cell_mass / grid.cell_volume);
}

GridDensity quantile_to_density_torus(const QuantileFunction& qf, const Grid& grid) {
  check_1d(grid);
  if (!grid.domain.is_periodic())
    throw std::invalid_argument("torus rebuild needs a periodic grid");
  const ArrayXd& q = qf.samples;
  const int N = qf.resolution();
  if (N < 2) throw std::invalid_argument("need at least two quantile samples");
  const double L = grid.domain.length(0);
  const double gap = q[0] + L - q[N - 1];
  if (gap < -1e-12 * L)
    throw std::invalid_argument("quantile range exceeds the period");
  ArrayXd cell_mass = ArrayXd::Zero(grid.size);
  const double w = 1.0 / N;
  for (int j = 0; j + 1 < N; ++j)
    deposit_wrapped(cell_mass, grid, q[j], q[j + 1], w);
  const double g2 = std::max(gap, 0.0) * 0.5;
  deposit_wrapped(cell_mass, grid, q[N - 1], q[N - 1] + g2, 0.5 * w);
  deposit_wrapped(cell_mass, grid, q[0] - g2, q[0], 0.5 * w);
  return GridDensity::unchecked(grid, cell_mass / grid.cell_volume);
}

double w2_quantile(const QuantileFunction& a, const QuantileFunction& b) {
  if (a.resolution() != b.resolution())
    throw std::invalid_argument("quantile resolutions differ");
  return std::sqrt((a.samples - b.samples).square().mean());
}

}  // namespace jkolab

#include "jkolab/ma_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace jkolab {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

// Unwrapped coordinate of cell index i along an axis; on a periodic axis the
// index may leave [0, n) and the coordinate follows the lift.
double axis_coord(const Grid& g, int axis, int i) {
  const int n = g.n[axis];
  if (!g.domain.periodic[axis]) return g.center(axis, i);
  const int q = floor_div(i, n);
  return g.center(axis, i - q * n) + q * g.domain.length(axis);
}

double shoelace(const std::vector<Vector2d>& poly) {
  double a = 0.0;
  const int k = static_cast<int>(poly.size());
  for (int i = 0; i < k; ++i) {
    const Vector2d& p = poly[i];
    const Vector2d& q = poly[(i + 1) % k];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::abs(a);
}

double roundoff_guard(const ConvexPotential& u, int d) {
  const double umax = u.values.abs().maxCoeff() + 1.0;
  const double h = std::min(u.grid.h[0], d == 2 ? u.grid.h[1] : u.grid.h[0]);
  return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::pow(umax / h, d));
}

// Minimum over tensor hat bumps (widths 1..3, centers in the window, supports
// kept inside it on non-periodic axes) of <values, lap phi> / <phi>, where
// `at(i, j)` samples the field one cell beyond the window when axes wrap.
template <class At>
double min_hat_action(const Grid& g, const CellWindow& window, const At& at) {
  const int d = g.dim();
  const double hx = g.h[0];
  const double hy = d == 2 ? g.h[1] : hx;
  const bool per = g.domain.periodic[0];
  double worst = std::numeric_limits<double>::infinity();
  for (int w = 1; w <= 3; ++w) {
    auto hat = [&](int k, int c) { return std::max(0.0, 1.0 - std::abs(k - c) / double(w)); };
    for (int cj = window.j0; cj <= window.j1; ++cj) {
      for (int ci = window.i0; ci <= window.i1; ++ci) {
        if (!per) {
          if (ci - w < window.i0 || ci + w > window.i1) continue;
          if (d == 2 && (cj - w < window.j0 || cj + w > window.j1)) continue;
        }
        double action = 0.0;  // sum of values * (discrete laplacian of the bump)
        for (int j = (d == 2 ? cj - w - 1 : 0); j <= (d == 2 ? cj + w + 1 : 0); ++j) {
          for (int i = ci - w - 1; i <= ci + w + 1; ++i) {
            const double px = hat(i, ci);
            const double py = d == 2 ? hat(j, cj) : 1.0;
            double lap = (hat(i + 1, ci) - 2.0 * px + hat(i - 1, ci)) * py / (hx * hx);
            if (d == 2) lap += (hat(j + 1, cj) - 2.0 * py + hat(j - 1, cj)) * px / (hy * hy);
            if (lap != 0.0) action += at(i, j) * lap;
          }
        }
        const double weight = std::pow(double(w), d);  // exact hat sum
        worst = std::min(worst, action / weight);
      }
    }
  }
  return worst;
}

}  // namespace

CellWindow interior_window(const Grid& grid, int halo) {
  CellWindow w;
  w.i0 = grid.domain.periodic[0] ? 0 : halo;
  w.i1 = grid.n[0] - 1 - (grid.domain.periodic[0] ? 0 : halo);
  if (grid.dim() == 2) {
    w.j0 = grid.domain.periodic[1] ? 0 : halo;
    w.j1 = grid.n[1] - 1 - (grid.domain.periodic[1] ? 0 : halo);
  }
  return w;
}

double MongeAmpereMeasure::window_mass(const CellWindow& w) const {
  double s = 0.0;
  for (int j = w.j0; j <= w.j1; ++j)
    for (int i = w.i0; i <= w.i1; ++i) s += cell_mass[grid.index(i, j)];
  return s;
}

MongeAmpereMeasure ma_measure_1d(const ConvexPotential& u, double atom_threshold) {
  const Grid& g = u.grid;
  const int n = g.n[0];
  const double h = g.h[0];
  const bool per = g.domain.periodic[0];
  MongeAmpereMeasure out;
  out.grid = g;
  out.cell_mass = ArrayXd::Zero(g.size);
  const int lo = per ? 0 : 1;
  const int hi = per ? n - 1 : n - 2;
  for (int i = lo; i <= hi; ++i) {
    const double sl = (u.lifted(i) - u.lifted(i - 1)) / h;
    const double sr = (u.lifted(i + 1) - u.lifted(i)) / h;
    const double jump = std::max(0.0, sr - sl);
    out.cell_mass[i] = jump;
    if (jump >= atom_threshold) out.atoms.push_back({{g.center(0, i), 0.0}, jump});
  }
  return out;
}

MongeAmpereMeasure ma_measure_2d(const ConvexPotential& u, double atom_threshold) {
  const Grid& g = u.grid;
  const int nx = g.n[0];
  const int ny = g.n[1];
  const bool perx = g.domain.periodic[0];
  const bool pery = g.domain.periodic[1];
  MongeAmpereMeasure out;
  out.grid = g;
  out.cell_mass = ArrayXd::Zero(g.size);

  // Slopes per axis of the lifted values, one-sided across every cell edge.
  // The subdifferential at a vertex sits inside the box of its four one-sided
  // difference quotients, so those four constraints seed the polygon and the
  // global slope span bounds how far a periodic image can still support it.
  ArrayXd U(g.size);
  for (int i = 0; i < g.size; ++i) U[i] = u.lifted(g.ix(i), g.iy(i));
  auto slope = [&](int axis, int i, int j) {
    const double a = u.lifted(i, j);
    const double b = axis == 0 ? u.lifted(i + 1, j) : u.lifted(i, j + 1);
    return (b - a) / g.h[axis];
  };
  int ring[2] = {0, 0};
  for (int axis = 0; axis < 2; ++axis) {
    if (!g.domain.periodic[axis]) continue;
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double s = slope(axis, i, j);
        lo = std::min(lo, s), hi = std::max(hi, s);
      }
    }
    ring[axis] = std::max(1, static_cast<int>(std::ceil((hi - lo) / g.domain.length(axis))));
  }

  std::vector<Vector2d> poly, next;
  const CellWindow interior = interior_window(g, 1);
  for (int j = interior.j0; j <= interior.j1; ++j) {
    for (int i = interior.i0; i <= interior.i1; ++i) {
      const double xv = g.center(0, i), yv = g.center(1, j);
      const double uv = U[g.index(i, j)];
      const double bx0 = slope(0, i - 1, j), bx1 = slope(0, i, j);
      const double by0 = slope(1, i, j - 1), by1 = slope(1, i, j);
      if (bx1 <= bx0 || by1 <= by0) continue;  // flat direction, zero area
      poly = {{bx0, by0}, {bx1, by0}, {bx1, by1}, {bx0, by1}};
      for (int sy = -ring[1]; sy <= ring[1]; ++sy) {
        for (int sx = -ring[0]; sx <= ring[0]; ++sx) {
          const double ox = sx * (perx ? g.domain.length(0) : 0.0);
          const double oy = sy * (pery ? g.domain.length(1) : 0.0);
          // lift across whole periods: u += shift * x + shift^2 / 2 per axis
          const double lift = 0.5 * ox * ox + 0.5 * oy * oy;
          for (int q = 0; q < g.size && !poly.empty(); ++q) {
            const int qi = g.ix(q), qj = g.iy(q);
            if (sx == 0 && sy == 0 && qi == i && qj == j) continue;
            const double xq = g.center(0, qi) + ox;
            const double yq = g.center(1, qj) + oy;
            const double wx = xq - xv, wy = yq - yv;
            const double du = U[q] + ox * g.center(0, qi) + oy * g.center(1, qj) + lift - uv;
            // quick reject: constraint cannot cut into the seed box
            const double reach = (wx >= 0.0 ? bx1 : bx0) * wx + (wy >= 0.0 ? by1 : by0) * wy;
            if (reach <= du) continue;
            next.clear();
            const int k = static_cast<int>(poly.size());
            for (int a = 0; a < k; ++a) {
              const Vector2d& p = poly[a];
              const Vector2d& r = poly[(a + 1) % k];
              const double fp = p.x() * wx + p.y() * wy - du;
              const double fr = r.x() * wx + r.y() * wy - du;
              if (fp <= 0.0) next.push_back(p);
              if ((fp < 0.0) != (fr < 0.0) && fp != fr) {
                const double t = fp / (fp - fr);
                next.push_back(p + t * (r - p));
              }
            }
            poly.swap(next);
          }
        }
      }
      const double area = shoelace(poly);
      const int c = g.index(i, j);
      out.cell_mass[c] = area;
      if (area >= atom_threshold) out.atoms.push_back({{g.center(0, i), g.center(1, j)}, area});
    }
  }
  return out;
}

ArrayXd plane_search_vertex_masses(const ConvexPotential& u, int lattice_per_axis) {
  const Grid& g = u.grid;
  const int nx = g.n[0];
  const int ny = g.n[1];
  const bool per = g.domain.periodic[0];
  // slope range from one-sided differences, padded by one lattice step
  double gx_lo = 1e300, gx_hi = -1e300, gy_lo = 1e300, gy_hi = -1e300;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double s = (u.values[g.index(i + 1, j)] - u.values[g.index(i, j)]) / g.h[0];
      gx_lo = std::min(gx_lo, s), gx_hi = std::max(gx_hi, s);
    }
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double s = (u.values[g.index(i, j + 1)] - u.values[g.index(i, j)]) / g.h[1];
      gy_lo = std::min(gy_lo, s), gy_hi = std::max(gy_hi, s);
    }
  }
  if (ny == 1) gy_lo = gy_hi = 0.0;
  const double dx = (gx_hi - gx_lo) / lattice_per_axis;
  const double dy = ny == 1 ? 1.0 : (gy_hi - gy_lo) / lattice_per_axis;
  gx_lo -= dx, gx_hi += dx;
  gy_lo -= dy, gy_hi += dy;

  // tiles to search: one period around the window on periodic domains
  std::vector<std::array<int, 2>> shifts{{0, 0}};
  if (per) {
    shifts.clear();
    for (int sy = (ny > 1 ? -1 : 0); sy <= (ny > 1 ? 1 : 0); ++sy)
      for (int sx = -1; sx <= 1; ++sx) shifts.push_back({sx, sy});
  }
  ArrayXd mass = ArrayXd::Zero(g.size);
  const int kx = lattice_per_axis + 2;
  const int ky = ny == 1 ? 1 : lattice_per_axis + 2;
  for (int b = 0; b < ky; ++b) {
    const double gy = gy_lo + (b + 0.5) * dy;
    for (int a = 0; a < kx; ++a) {
      const double gx = gx_lo + (a + 0.5) * dx;
      double best = 1e300;
      int best_cell = -1;
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          for (const auto& s : shifts) {
            const int ii = i + s[0] * nx, jj = j + s[1] * ny;
            const double v =
                u.lifted(ii, jj) - gx * axis_coord(g, 0, ii) -
                (ny == 1 ? 0.0 : gy * axis_coord(g, 1, jj));
            if (v < best) {
              best = v;
              best_cell = g.index(i, j);
            }
          }
        }
      }
      mass[best_cell] += ny == 1 ? dx : dx * dy;
    }
  }
  return mass;
}

MaBoundReport ma_lower_bound_check(const ConvexPotential& u, double lambda,
                                   const CellWindow& window) {
  if (lambda < 0.0) throw std::invalid_argument("ma_lower_bound_check: negative lambda");
  const Grid& g = u.grid;
  const int d = g.dim();
  const CellWindow interior = interior_window(g, 1);
  if (window.i0 < interior.i0 || window.i1 > interior.i1 || window.j0 < interior.j0 ||
      window.j1 > interior.j1)
    throw std::invalid_argument("ma_lower_bound_check: window touches the boundary");
  const MongeAmpereMeasure mu =
      d == 1 ? ma_measure_1d(u, 1e300) : ma_measure_2d(u, 1e300);
  const double vol = g.cell_volume;
  const double target = std::pow(lambda, d) * vol;
  MaBoundReport rep;
  rep.slack = d * u.delta_conv / std::min(g.h[0], d == 2 ? g.h[1] : g.h[0]) +
              roundoff_guard(u, d);
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int j = window.j0; j <= window.j1; ++j) {
    for (int i = window.i0; i <= window.i1; ++i) {
      const int c = g.index(i, j);
      const double m = mu.cell_mass[c];
      const double margin = m + rep.slack - target;
      if (margin < worst_margin) {
        worst_margin = margin;
        rep.worst_cell = c;
      }
      if (target > 0.0) rep.worst_ratio = std::min(rep.worst_ratio, m / target);
    }
  }
  rep.ok = worst_margin >= 0.0;
  return rep;
}

WeakLaplaceReport amgm_subharmonic_check(const ConvexPotential& u, double lambda,
                                         const CellWindow& window) {
  if (lambda < 0.0) throw std::invalid_argument("amgm_subharmonic_check: negative lambda");
  const Grid& g = u.grid;
  const int d = g.dim();
  const CellWindow interior = interior_window(g, 1);
  if (window.i0 < interior.i0 || window.i1 > interior.i1 || window.j0 < interior.j0 ||
      window.j1 > interior.j1)
    throw std::invalid_argument("amgm_subharmonic_check: window touches the boundary");
  WeakLaplaceReport rep;
  rep.slack = 4.0 * d * u.delta_conv / (g.h[0] * g.h[0]) + roundoff_guard(u, d) / g.cell_volume;
  const auto at = [&](int i, int j) { return u.lifted(i, j); };
  rep.margin = min_hat_action(g, window, at) - d * lambda;
  rep.ok = rep.margin >= -rep.slack;
  return rep;
}

WeakLaplaceReport weak_laplace_check(const Grid& grid, const ArrayXd& values, double bound,
                                     const CellWindow& window, double extra_slack) {
  const int d = grid.dim();
  if (values.size() != grid.size)
    throw std::invalid_argument("weak_laplace_check: values size does not match the grid");
  const CellWindow interior = interior_window(grid, 1);
  if (window.i0 < interior.i0 || window.i1 > interior.i1 || window.j0 < interior.j0 ||
      window.j1 > interior.j1)
    throw std::invalid_argument("weak_laplace_check: window touches the boundary");
  const auto at = [&](int i, int j) {
    const int ii = grid.domain.periodic[0] ? grid.wrap(0, i) : i;
    const int jj = d == 2 && grid.domain.periodic[1] ? grid.wrap(1, j) : j;
    return values[d == 2 ? grid.index(ii, jj) : ii];
  };
  const double hx = grid.h[0];
  const double hy = d == 2 ? grid.h[1] : hx;
  const double vmax = values.abs().maxCoeff() + 1.0;
  WeakLaplaceReport rep;
  rep.slack = extra_slack + 1024.0 * std::numeric_limits<double>::epsilon() * vmax *
                                (1.0 / (hx * hx) + 1.0 / (hy * hy));
  rep.margin = min_hat_action(grid, window, at) - bound;
  rep.ok = rep.margin >= -rep.slack;
  return rep;
}

}  // namespace jkolab

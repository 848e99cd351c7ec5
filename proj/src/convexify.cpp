#include "jkolab/convexify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace jkolab {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

// Lower hull of points sorted by x, evaluated back at every x: the classic
// monotone scan dropping middle points that sit above the chord of their
// neighbors.
std::vector<double> lower_hull_values(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  std::vector<int> stack;
  stack.reserve(n);
  auto above = [&](int a, int b, int c) {
    // true when b lies on or above the chord a-c
    return (y[b] - y[a]) * (x[c] - x[b]) >= (y[c] - y[b]) * (x[b] - x[a]);
  };
  for (int i = 0; i < n; ++i) {
    while (stack.size() >= 2 && above(stack[stack.size() - 2], stack.back(), i)) stack.pop_back();
    stack.push_back(i);
  }
  std::vector<double> env(n);
  int seg = 0;
  for (int i = 0; i < n; ++i) {
    while (seg + 1 < static_cast<int>(stack.size()) && x[stack[seg + 1]] < x[i]) ++seg;
    const int a = stack[seg];
    const int b = stack[std::min(seg + 1, static_cast<int>(stack.size()) - 1)];
    if (a == b || x[b] == x[a]) {
      env[i] = y[a];
    } else {
      const double t = (x[i] - x[a]) / (x[b] - x[a]);
      env[i] = y[a] + t * (y[b] - y[a]);
    }
  }
  return env;
}

// Fixed-dimension randomized LP: maximize c.z over {A_k . z <= b_k} within a
// large box. Dimensions 1 and 2 are solved directly; dimension 3 recurses
// onto the plane of each violated constraint.
struct Lp1Result {
  bool feasible = true;
  double t = 0.0;
};

Lp1Result lp1(double dir, double box, const std::vector<double>& a, const std::vector<double>& b) {
  double lo = -box, hi = box;
  for (size_t k = 0; k < a.size(); ++k) {
    const double scale = std::abs(b[k]) + 1.0;
    if (a[k] > 1e-14) {
      hi = std::min(hi, b[k] / a[k]);
    } else if (a[k] < -1e-14) {
      lo = std::max(lo, b[k] / a[k]);
    } else if (b[k] < -1e-11 * scale) {
      return {false, 0.0};
    }
  }
  if (lo > hi) return {false, 0.0};
  return {true, dir >= 0.0 ? hi : lo};
}

struct Lp2Result {
  bool feasible = true;
  double s = 0.0, t = 0.0;
};

Lp2Result lp2(double cs, double ct, double box, const std::vector<double>& as,
              const std::vector<double>& at, const std::vector<double>& b) {
  // start at the box corner optimal for the objective alone
  double s = (cs >= 0.0 ? box : -box);
  double t = (ct >= 0.0 ? box : -box);
  const int m = static_cast<int>(b.size());
  for (int k = 0; k < m; ++k) {
    const double scale = std::abs(as[k]) * box + std::abs(at[k]) * box + std::abs(b[k]) + 1.0;
    if (as[k] * s + at[k] * t <= b[k] + 1e-11 * scale) continue;
    // resolve on the line as*s + at*t = b of constraint k
    const double nn = std::hypot(as[k], at[k]);
    if (nn < 1e-14) return {false, 0.0, 0.0};
    const double ns = as[k] / nn, nt = at[k] / nn;
    const double p0s = ns * (b[k] / nn), p0t = nt * (b[k] / nn);
    const double ds = -nt, dt = ns;  // tangent direction
    std::vector<double> la(k + 4), lb(k + 4);
    for (int j = 0; j < k; ++j) {
      la[j] = as[j] * ds + at[j] * dt;
      lb[j] = b[j] - (as[j] * p0s + at[j] * p0t);
    }
    // box faces as explicit constraints on the line parameter
    la[k] = ds;
    lb[k] = box - p0s;
    la[k + 1] = -ds;
    lb[k + 1] = box + p0s;
    la[k + 2] = dt;
    lb[k + 2] = box - p0t;
    la[k + 3] = -dt;
    lb[k + 3] = box + p0t;
    const Lp1Result r = lp1(cs * ds + ct * dt, 2.0 * box, la, lb);
    if (!r.feasible) return {false, 0.0, 0.0};
    s = p0s + r.t * ds;
    t = p0t + r.t * dt;
  }
  return {true, s, t};
}

struct Lp3Result {
  bool feasible = true;
  Eigen::Vector3d z = Eigen::Vector3d::Zero();
};

Lp3Result lp3(const Eigen::Vector3d& c, const std::vector<Eigen::Vector3d>& A,
              const std::vector<double>& b, const std::vector<int>& order, double box) {
  Eigen::Vector3d z{c.x() >= 0.0 ? box : -box, c.y() >= 0.0 ? box : -box,
                    c.z() >= 0.0 ? box : -box};
  const int m = static_cast<int>(order.size());
  for (int idx = 0; idx < m; ++idx) {
    const int k = order[idx];
    const double scale = A[k].cwiseAbs().sum() * box + std::abs(b[k]) + 1.0;
    if (A[k].dot(z) <= b[k] + 1e-11 * scale) continue;
    // resolve on the plane A_k . z = b_k over the constraints seen so far
    const Eigen::Vector3d n = A[k].normalized();
    const Eigen::Vector3d p0 = n * (b[k] / A[k].norm());
    Eigen::Vector3d e1 = n.cross(std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                       : Eigen::Vector3d::UnitY());
    e1.normalize();
    const Eigen::Vector3d e2 = n.cross(e1);
    std::vector<double> as, at, bb;
    as.reserve(idx + 6);
    at.reserve(idx + 6);
    bb.reserve(idx + 6);
    for (int jdx = 0; jdx < idx; ++jdx) {
      const int j = order[jdx];
      as.push_back(A[j].dot(e1));
      at.push_back(A[j].dot(e2));
      bb.push_back(b[j] - A[j].dot(p0));
    }
    for (int axis = 0; axis < 3; ++axis) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::Vector3d f = Eigen::Vector3d::Zero();
        f[axis] = sgn;
        as.push_back(f.dot(e1));
        at.push_back(f.dot(e2));
        bb.push_back(box - f.dot(p0));
      }
    }
    const Lp2Result r = lp2(c.dot(e1), c.dot(e2), 2.0 * box, as, at, bb);
    if (!r.feasible) return {false, Eigen::Vector3d::Zero()};
    z = p0 + r.s * e1 + r.t * e2;
  }
  return {true, z};
}

}  // namespace

double ConvexPotential::lifted(int ix, int iy) const {
  const int nx = grid.n[0];
  const int ny = grid.n[1];
  int qx = 0, qy = 0, rx = ix, ry = iy;
  if (grid.domain.periodic[0]) {
    qx = floor_div(ix, nx);
    rx = ix - qx * nx;
  }
  if (grid.dim() == 2 && grid.domain.periodic[1]) {
    qy = floor_div(iy, ny);
    ry = iy - qy * ny;
  }
  double v = values[grid.index(rx, ry)];
  if (qx != 0) {
    const double shift = qx * grid.domain.length(0);
    v += shift * grid.center(0, rx) + 0.5 * shift * shift;
  }
  if (qy != 0) {
    const double shift = qy * grid.domain.length(1);
    v += shift * grid.center(1, ry) + 0.5 * shift * shift;
  }
  return v;
}

ConvexPotential convexify(const Grid& grid, const ArrayXd& u_raw) {
  ConvexPotential out;
  out.grid = grid;
  out.values = u_raw;
  out.convexified = true;

  ConvexPotential raw;  // lift access to the raw data while tiling
  raw.grid = grid;
  raw.values = u_raw;

  const bool per_x = grid.domain.periodic[0];
  if (grid.dim() == 1) {
    const int n = grid.n[0];
    const int tile = per_x ? 3 : 1;
    std::vector<double> xs, ys;
    xs.reserve(n * tile);
    ys.reserve(n * tile);
    const int off = per_x ? n : 0;
    for (int i = -off; i < n * (tile - (per_x ? 1 : 0)); ++i) {
      xs.push_back(grid.center(0, per_x ? ((i % n) + n) % n : i) +
                   (per_x ? floor_div(i, n) * grid.domain.length(0) : 0.0));
      ys.push_back(raw.lifted(i));
    }
    const std::vector<double> env = lower_hull_values(xs, ys);
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = std::min(u_raw[i], env[off + i]);
      delta = std::max(delta, u_raw[i] - e);
      out.values[i] = e;
    }
    out.delta_conv = delta;
    return out;
  }

  const int nx = grid.n[0];
  const int ny = grid.n[1];
  const bool per = per_x;  // both axes periodic together on the torus
  std::vector<Eigen::Vector3d> A;
  std::vector<double> b;
  const int halo_lo = per ? -nx : 0;
  const int halo_hi = per ? 2 * nx : nx;
  for (int j = (per ? -ny : 0); j < (per ? 2 * ny : ny); ++j) {
    for (int i = halo_lo; i < halo_hi; ++i) {
      const double x = grid.center(0, per ? ((i % nx) + nx) % nx : i) +
                       (per ? floor_div(i, nx) * grid.domain.length(0) : 0.0);
      const double y = grid.center(1, per ? ((j % ny) + ny) % ny : j) +
                       (per ? floor_div(j, ny) * grid.domain.length(1) : 0.0);
      A.emplace_back(x, y, 1.0);
      b.push_back(raw.lifted(i, j));
    }
  }
  const int m = static_cast<int>(b.size());
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::shuffle(order.begin(), order.end(), rng);

  const double umax = u_raw.abs().maxCoeff() + 1.0;
  const double slope = 4.0 * umax / std::min(grid.h[0], grid.h[1]) + grid.domain.diameter();
  const double box = 4.0 * (slope + umax + slope * grid.domain.diameter());

  double delta = 0.0;
  std::vector<int> local = order;
  for (int cell = 0; cell < grid.size; ++cell) {
    // rotate the global order so ties break differently per point
    std::rotate(local.begin(), local.begin() + (cell * 37) % m, local.end());
    const Vector2d p = grid.center2(cell);
    const Lp3Result r = lp3({p.x(), p.y(), 1.0}, A, b, local, box);
    const double env = r.feasible ? std::min(u_raw[cell], r.z.x() * p.x() + r.z.y() * p.y() + r.z.z())
                                  : u_raw[cell];
    delta = std::max(delta, u_raw[cell] - env);
    out.values[cell] = env;
  }
  out.delta_conv = delta;
  return out;
}

}  // namespace jkolab

#include "jkolab/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace jkolab {
namespace {

using Eigen::ArrayXXd;

// Half squared center-to-center distance along one axis, wrapped when the
// axis is periodic. Axes beyond the dimension collapse to a 1x1 zero, which
// turns every 2D pass into its 1D version for free.
ArrayXXd axis_cost(const Grid& g, int axis) {
  if (axis >= g.dim()) return ArrayXXd::Zero(1, 1);
  const int n = g.n[axis];
  const double L = g.domain.length(axis);
  const bool per = g.domain.periodic[axis];
  ArrayXXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double d = std::abs(g.center(axis, i) - g.center(axis, j));
      if (per) d = std::min(d, L - d);
      c(i, j) = 0.5 * d * d;
    }
  return c;
}

// out(i, q) = eps * logsumexp_k((A(i, k) - C(q, k)) / eps): a soft
// C-convolution along the second index. Rows of -inf stay -inf.
ArrayXXd softsum_cols(const ArrayXXd& A, const ArrayXXd& C, double eps) {
  const Eigen::Index rows = A.rows(), m = A.cols();
  ArrayXXd out(rows, C.rows());
  ArrayXXd ws(rows, m);
  ArrayXd rmax(rows);
  for (Eigen::Index q = 0; q < C.rows(); ++q) {
    ws = A.rowwise() - C.row(q);
    rmax = ws.rowwise().maxCoeff();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double mr = rmax[r];
      if (!std::isfinite(mr)) {
        out(r, q) = -kInf;
        continue;
      }
      out(r, q) = mr + eps * std::log(((ws.row(r) - mr) / eps).exp().sum());
    }
  }
  return out;
}

// out(q, j) = eps * logsumexp_k((A(k, j) - C(q, k)) / eps): the same pass
// along the first index.
ArrayXXd softsum_rows(const ArrayXXd& A, const ArrayXXd& C, double eps) {
  const Eigen::Index cols = A.cols(), m = A.rows();
  ArrayXXd out(C.rows(), cols);
  ArrayXXd ws(m, cols);
  ArrayXd cmax(cols);
  for (Eigen::Index q = 0; q < C.rows(); ++q) {
    ws = A.colwise() - C.row(q).transpose();
    cmax = ws.colwise().maxCoeff();
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double mc = cmax[c];
      if (!std::isfinite(mc)) {
        out(q, c) = -kInf;
        continue;
      }
      out(q, c) = mc + eps * std::log(((ws.col(c) - mc) / eps).exp().sum());
    }
  }
  return out;
}

// out(i, j) = eps * logsumexp_k((A(i, k) + B(j, k)) / eps), the contraction
// shared by the <plan, c> marginals.
ArrayXXd softdot(const ArrayXXd& A, const ArrayXXd& B, double eps) {
  ArrayXXd out(A.rows(), B.rows());
  ArrayXXd ws(B.rows(), B.cols());
  ArrayXd rmax(B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    ws = B.rowwise() + A.row(i);
    rmax = ws.rowwise().maxCoeff();
    for (Eigen::Index r = 0; r < B.rows(); ++r) {
      const double mr = rmax[r];
      if (!std::isfinite(mr)) {
        out(i, r) = -kInf;
        continue;
      }
      out(i, r) = mr + eps * std::log(((ws.row(r) - mr) / eps).exp().sum());
    }
  }
  return out;
}

struct Workspace {
  Grid grid;
  int nx = 0, ny = 0;
  ArrayXXd cx, cy;      // per-axis half squared distances
  ArrayXXd la, lb;      // log cell masses, -inf on empty cells
  ArrayXd a, b;         // cell masses
  double cost_scale() const { return cx.maxCoeff() + cy.maxCoeff(); }

  ArrayXXd lift(const ArrayXd& flat) const {
    return Eigen::Map<const ArrayXXd>(flat.data(), nx, ny);
  }
  // One dual half-update: gtil = g + eps * log(mass), both marginals share it
  // because cx and cy are symmetric.
  ArrayXXd half_update(const ArrayXXd& gtil, double eps) const {
    return -softsum_rows(softsum_cols(gtil, cy, eps), cx, eps);
  }
};

Workspace make_workspace(const GridDensity& rho, const GridDensity& mu) {
  if (!rho.grid.same_layout(mu.grid))
    throw std::invalid_argument("sinkhorn: densities live on different grids");
  Workspace w;
  w.grid = rho.grid;
  w.nx = w.grid.n[0];
  w.ny = w.grid.n[1];
  w.cx = axis_cost(w.grid, 0);
  w.cy = axis_cost(w.grid, 1);
  w.a = rho.values * w.grid.cell_volume;
  w.b = mu.values * w.grid.cell_volume;
  if ((w.a < 0).any() || (w.b < 0).any())
    throw std::invalid_argument("sinkhorn: negative cell mass");
  if (std::abs(w.a.sum() - w.b.sum()) > 1e-9 * std::max(1.0, w.a.sum()))
    throw std::invalid_argument("sinkhorn: total masses differ");
  w.la = w.lift(w.a).log();
  w.lb = w.lift(w.b).log();
  return w;
}

// Geometric warm-up ladder ending at eps: larger regularizations converge in
// a few sweeps and their duals seed the next rung.
std::vector<double> eps_ladder(double eps, double scale, bool enabled) {
  std::vector<double> rungs{eps};
  if (!enabled) return rungs;
  double e = 4.0 * eps;
  while (e < 0.5 * scale) {
    rungs.push_back(e);
    e *= 4.0;
  }
  std::reverse(rungs.begin(), rungs.end());
  return rungs;
}

// L1 defect of the second marginal implied by replacing g with its exact
// half-update g_cand: sum of mass * |exp((g - g_cand) / eps) - 1|.
double marginal_defect(const ArrayXd& mass, const ArrayXXd& g, const ArrayXXd& g_cand,
                       double eps, const Workspace& w) {
  double err = 0.0;
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      const double m = mass[i + w.nx * j];
      if (m > 0.0) err += m * std::abs(std::expm1((g(i, j) - g_cand(i, j)) / eps));
    }
  return err;
}

}  // namespace

EntropicPlan sinkhorn(const GridDensity& rho, const GridDensity& mu, double eps, double tol,
                      const SinkhornOptions& opt) {
  if (!(eps > 0.0) || !(tol > 0.0))
    throw std::invalid_argument("sinkhorn: eps and tol must be positive");
  Workspace w = make_workspace(rho, mu);

  ArrayXXd alpha = ArrayXXd::Zero(w.nx, w.ny);
  ArrayXXd beta = ArrayXXd::Zero(w.nx, w.ny);
  const bool warm = opt.warm_alpha != nullptr && opt.warm_beta != nullptr;
  if (warm) {
    if (opt.warm_alpha->size() != w.grid.size || opt.warm_beta->size() != w.grid.size)
      throw std::invalid_argument("sinkhorn: warm start size mismatch");
    alpha = w.lift(*opt.warm_alpha);
    beta = w.lift(*opt.warm_beta);
  }

  const std::vector<double> rungs = eps_ladder(eps, w.cost_scale(), opt.ladder && !warm);
  int iterations = 0;
  double err = kInf;
  for (std::size_t r = 0; r < rungs.size(); ++r) {
    const double e = rungs[r];
    const double target = r + 1 == rungs.size() ? tol : std::max(tol, 1e-3);
    err = kInf;
    while (err > target) {
      if (iterations >= opt.max_iterations)
        throw std::runtime_error("sinkhorn: no convergence after " +
                                 std::to_string(iterations) + " iterations, marginal error " +
                                 std::to_string(err));
      alpha = w.half_update(beta + e * w.lb, e);
      const ArrayXXd beta_cand = w.half_update(alpha + e * w.la, e);
      err = marginal_defect(w.b, beta, beta_cand, e, w);
      ++iterations;
      if (err > target) beta = beta_cand;
    }
  }

  EntropicPlan plan;
  plan.grid = w.grid;
  plan.eps = eps;
  plan.alpha = Eigen::Map<const ArrayXd>(alpha.data(), w.grid.size);
  plan.beta = Eigen::Map<const ArrayXd>(beta.data(), w.grid.size);
  plan.value = (w.a * plan.alpha).sum() + (w.b * plan.beta).sum();
  plan.marginal_error_rho = 0.0;  // exact after the closing alpha half-sweep
  plan.marginal_error_mu = err;
  plan.iterations = iterations;
  if (opt.want_cost) {
    const ArrayXXd atil = alpha + eps * w.la;
    const ArrayXXd btil = beta + eps * w.lb;
    double cost = 0.0;
    {
      const ArrayXXd s1 = softsum_cols(btil, w.cy, eps);     // (y1, x2)
      const ArrayXXd logi = softdot(atil, s1, eps);          // (x1, y1)
      cost += (w.cx * ((logi - w.cx) / eps).exp()).sum();
    }
    if (w.ny > 1) {
      const ArrayXXd s1r = softsum_rows(btil, w.cx, eps);    // (x1, y2)
      const ArrayXXd logi =
          softdot(atil.transpose().eval(), s1r.transpose().eval(), eps);  // (x2, y2)
      cost += (w.cy * ((logi - w.cy) / eps).exp()).sum();
    }
    plan.cost = cost;
  }
  return plan;
}

ArrayXd self_potential(const GridDensity& rho, double eps, double tol,
                       const SinkhornOptions& opt) {
  if (!(eps > 0.0) || !(tol > 0.0))
    throw std::invalid_argument("self_potential: eps and tol must be positive");
  Workspace w = make_workspace(rho, rho);

  ArrayXXd gamma = ArrayXXd::Zero(w.nx, w.ny);
  const bool warm = opt.warm_alpha != nullptr;
  if (warm) {
    if (opt.warm_alpha->size() != w.grid.size)
      throw std::invalid_argument("self_potential: warm start size mismatch");
    gamma = w.lift(*opt.warm_alpha);
  }

  const std::vector<double> rungs = eps_ladder(eps, w.cost_scale(), opt.ladder && !warm);
  int iterations = 0;
  for (std::size_t r = 0; r < rungs.size(); ++r) {
    const double e = rungs[r];
    const double target = r + 1 == rungs.size() ? tol : std::max(tol, 1e-3);
    double err = kInf;
    while (err > target) {
      if (iterations >= opt.max_iterations)
        throw std::runtime_error("self_potential: no convergence after " +
                                 std::to_string(iterations) + " iterations");
      const ArrayXXd cand = w.half_update(gamma + e * w.la, e);
      err = marginal_defect(w.a, gamma, cand, e, w);
      gamma = 0.5 * (gamma + cand);  // damped: the averaged map is a contraction
      ++iterations;
    }
  }
  return Eigen::Map<const ArrayXd>(gamma.data(), w.grid.size);
}

double sinkhorn_divergence(const GridDensity& rho, const GridDensity& mu, double eps,
                           double tol) {
  SinkhornOptions opt;
  opt.want_cost = false;
  const EntropicPlan plan = sinkhorn(rho, mu, eps, tol, opt);
  const ArrayXd ga = self_potential(rho, eps, tol);
  const ArrayXd gb = self_potential(mu, eps, tol);
  const double a_vol = rho.grid.cell_volume;
  const double self_rho = (rho.values * ga).sum() * a_vol;
  const double self_mu = (mu.values * gb).sum() * mu.grid.cell_volume;
  return 2.0 * (plan.value - self_rho - self_mu);
}

BarycentricMap barycentric_map(const EntropicPlan& plan, const GridDensity& rho,
                               const GridDensity& mu) {
  Workspace w = make_workspace(rho, mu);
  if (!plan.grid.same_layout(w.grid))
    throw std::invalid_argument("barycentric_map: plan grid mismatch");
  const double eps = plan.eps;
  const ArrayXXd amat = w.lift(plan.alpha);
  const ArrayXXd btil = w.lift(plan.beta) + eps * w.lb;

  BarycentricMap map;
  map.grid = w.grid;
  map.tx.resize(w.grid.size);
  map.ty.resize(w.grid.dim() == 2 ? w.grid.size : 0);
  map.flagged.assign(w.grid.size, 0);

  // Angular or linear moments of one axis of the conditional plan. For cell
  // (x1, x2) the conditional mass on slice y1 is exp of
  //   (alpha(x1, x2) - cx(x1, y1) + sy(y1, x2)) / eps,
  // which sums to one over y1, so plain exponentials are safe.
  const double stability_radius = 0.05;
  for (int axis = 0; axis < w.grid.dim(); ++axis) {
    const int n = w.grid.n[axis];
    const bool per = w.grid.domain.periodic[axis];
    const double lo = w.grid.domain.lo[axis];
    const double L = w.grid.domain.length(axis);
    ArrayXd coord(n), cosv(n), sinv(n);
    for (int i = 0; i < n; ++i) {
      coord[i] = w.grid.center(axis, i);
      const double th = 2.0 * kPi * (coord[i] - lo) / L;
      cosv[i] = std::cos(th);
      sinv[i] = std::sin(th);
    }
    // sy(y1, x2) for axis 0; sx(x1, y2) for axis 1.
    const ArrayXXd s = axis == 0 ? softsum_cols(btil, w.cy, eps).eval()
                                 : softsum_rows(btil, w.cx, eps).eval();
    const int outer = axis == 0 ? w.ny : w.nx;
    const int inner = axis == 0 ? w.nx : w.ny;
    ArrayXXd q(inner, n);
    for (int o = 0; o < outer; ++o) {
      if (axis == 0) {
        // rows x1, cols y1; fixed x2 = o
        q = ((-w.cx).rowwise() + s.col(o).transpose()).colwise() + amat.col(o);
      } else {
        // rows x2, cols y2; fixed x1 = o
        q = ((-w.cy).rowwise() + s.row(o)).colwise() + amat.row(o).transpose();
      }
      q = (q / eps).exp();
      for (int i = 0; i < inner; ++i) {
        const int cell = axis == 0 ? i + w.nx * o : o + w.nx * i;
        ArrayXd& t = axis == 0 ? map.tx : map.ty;
        if (!(w.a[cell] > 0.0)) {
          t[cell] = w.grid.center(axis, i);
          continue;
        }
        if (per) {
          const double cs = (q.row(i).transpose() * cosv).sum();
          const double sn = (q.row(i).transpose() * sinv).sum();
          const double radius = std::hypot(cs, sn);
          if (radius < stability_radius) {
            map.flagged[cell] = 1;
            t[cell] = w.grid.center(axis, i);
            continue;
          }
          double frac = std::atan2(sn, cs) / (2.0 * kPi);
          if (frac < 0.0) frac += 1.0;
          t[cell] = lo + L * frac;
        } else {
          t[cell] = (q.row(i).transpose() * coord).sum();
        }
      }
    }
  }
  return map;
}

BoundaryReport boundary_behavior_check(const BarycentricMap& map) {
  const Grid& g = map.grid;
  if (g.dim() != 2 || g.domain.periodic[0] || g.domain.periodic[1])
    throw std::invalid_argument("boundary_behavior_check needs a non-periodic 2D grid");
  const int nx = g.n[0], ny = g.n[1];
  BoundaryReport rep;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const bool bx = ix == 0 || ix == nx - 1;
      const bool by = iy == 0 || iy == ny - 1;
      if (!bx && !by) continue;
      const int cell = g.index(ix, iy);
      if (bx && by) {
        const double cxr = ix == 0 ? g.domain.lo[0] : g.domain.hi[0];
        const double cyr = iy == 0 ? g.domain.lo[1] : g.domain.hi[1];
        rep.corner_err = std::max(rep.corner_err,
                                  std::hypot(map.tx[cell] - cxr, map.ty[cell] - cyr));
      } else if (bx) {
        rep.face_err = std::max(rep.face_err, std::abs(map.tx[cell] - g.center(0, ix)));
      } else {
        rep.face_err = std::max(rep.face_err, std::abs(map.ty[cell] - g.center(1, iy)));
      }
    }
  return rep;
}

}  // namespace jkolab

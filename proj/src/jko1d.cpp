#include "jkolab/jko1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "jkolab/isotonic.hpp"

namespace jkolab {

namespace {

// Per-gap energy with density g_hat = 1/(N d): value (1/N) f_m(g_hat)/g_hat,
// first derivative -g_hat^m, second derivative m N g_hat^(m+1).
double ghat_pow(double ghat, double p) {
  if (p == 1.0) return ghat;
  if (p == 2.0) return ghat * ghat;
  if (p == 3.0) return ghat * ghat * ghat;
  return std::pow(ghat, p);
}

double gap_energy(double ghat, double m, int N) {
  if (m == 1.0) return std::log(ghat) / N;
  return ghat_pow(ghat, m - 1.0) / ((m - 1.0) * N);
}

struct Tridiagonal {
  ArrayXd sub, diag, super;
};

// Thomas elimination; diag is strictly positive in our use.
ArrayXd solve_tridiagonal(const Tridiagonal& t, const ArrayXd& rhs) {
  const int n = static_cast<int>(rhs.size());
  ArrayXd c(n), d(n);
  c[0] = t.super[0] / t.diag[0];
  d[0] = rhs[0] / t.diag[0];
  for (int i = 1; i < n; ++i) {
    const double denom = t.diag[i] - t.sub[i] * c[i - 1];
    c[i] = (i + 1 < n) ? t.super[i] / denom : 0.0;
    d[i] = (rhs[i] - t.sub[i] * d[i - 1]) / denom;
  }
  ArrayXd x(n);
  x[n - 1] = d[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

// Cyclic system: tridiagonal plus equal corner entries w, solved by removing
// a rank-one term u u^T / sigma with u = (sigma, 0, ..., 0, w).
ArrayXd solve_cyclic_tridiagonal(Tridiagonal t, double w, const ArrayXd& rhs) {
  const int n = static_cast<int>(rhs.size());
  const double sigma = -t.diag[0];
  t.diag[0] -= sigma;
  t.diag[n - 1] -= w * w / sigma;
  ArrayXd u = ArrayXd::Zero(n);
  u[0] = sigma;
  u[n - 1] = w;
  const ArrayXd y = solve_tridiagonal(t, rhs);
  const ArrayXd z = solve_tridiagonal(t, u);
  const double factor = (u * y).sum() / (sigma + (u * z).sum());
  return y - factor * z;
}

double wrapped_distance(double a, double b, double L) {
  double d = std::abs(a - b);
  d -= L * std::floor(d / L);
  return std::min(d, L - d);
}

}  // namespace

QuantileObjective::QuantileObjective(ArrayXd datum, const Domain& domain,
                                     const SchemeParams& prm)
    : datum_(std::move(datum)),
      m_(prm.m),
      tau_(prm.tau),
      periodic_(domain.is_periodic()),
      lo_(domain.lo[0]),
      hi_(domain.lo[0] + domain.length(0)),
      length_(domain.length(0)),
      gap_floor_(1e-12 * domain.length(0)),
      n_(static_cast<int>(datum_.size())) {
  if (domain.dim != 1) throw std::invalid_argument("quantile objective is 1d only");
  if (n_ < 4) throw std::invalid_argument("need at least 4 quantile samples");
  if (!(tau_ > 0.0)) throw std::invalid_argument("step size must be positive");
}

void QuantileObjective::set_datum(ArrayXd datum) {
  if (static_cast<int>(datum.size()) != n_)
    throw std::invalid_argument("datum resolution changed");
  datum_ = std::move(datum);
}

double QuantileObjective::value(const ArrayXd& q) const {
  const int G = periodic_ ? n_ : n_ - 1;
  double e = 0.0;
  for (int j = 0; j < G; ++j) {
    const double gap = (j + 1 < n_) ? q[j + 1] - q[j] : q[0] + length_ - q[n_ - 1];
    e += gap_energy(1.0 / (n_ * gap), m_, n_);
  }
  const double w = (q - datum_).matrix().squaredNorm() / (2.0 * tau_ * n_);
  return e + w;
}

ArrayXd QuantileObjective::gradient(const ArrayXd& q) const {
  const int G = periodic_ ? n_ : n_ - 1;
  ArrayXd grad = (q - datum_) / (tau_ * n_);
  for (int j = 0; j < G; ++j) {
    const int jn = (j + 1) % n_;
    const double gap = (j + 1 < n_) ? q[j + 1] - q[j] : q[0] + length_ - q[n_ - 1];
    const double eprime = -ghat_pow(1.0 / (n_ * gap), m_);
    grad[j] -= eprime;
    grad[jn] += eprime;
  }
  return grad;
}

ArrayXd QuantileObjective::project(const ArrayXd& q) const {
  const double g = gap_floor_;
  ArrayXd r(n_);
  for (int j = 0; j < n_; ++j) r[j] = q[j] - g * j;
  ArrayXd fitted;
  if (periodic_) {
    // Wrap gap >= g becomes a range cap in the shifted coordinates.
    fitted = isotonic_fit_range_limited(r, length_ - n_ * g);
  } else {
    fitted = isotonic_fit_bounded(r, lo_, hi_ - g * (n_ - 1));
  }
  for (int j = 0; j < n_; ++j) fitted[j] += g * j;
  return fitted;
}

// Stationarity measure in gradient units: displacement of a short projected
// gradient step divided by its length. The step must stay well below the gap
// sizes, else the monotone projection pools unrelated coordinates and hides a
// live gradient; 1/max-curvature keeps it safe near the minimizer.
double QuantileObjective::rms_projected_gradient(const ArrayXd& q) const {
  const double t = 1.0 / curvature_bound(q);
  const ArrayXd step = q - project(q - t * gradient(q));
  return std::sqrt(step.square().sum() / n_) / t;
}

double QuantileObjective::curvature_bound(const ArrayXd& q) const {
  const int G = periodic_ ? n_ : n_ - 1;
  double worst = 1.0 / (tau_ * n_);
  for (int j = 0; j < G; ++j) {
    const double gap = (j + 1 < n_) ? q[j + 1] - q[j] : q[0] + length_ - q[n_ - 1];
    worst = std::max(worst,
                     1.0 / (tau_ * n_) + 2.0 * m_ * n_ * ghat_pow(1.0 / (n_ * gap), m_ + 1.0));
  }
  return worst;
}

ArrayXd QuantileObjective::newton_step(const ArrayXd& q) const {
  const int G = periodic_ ? n_ : n_ - 1;
  ArrayXd epp(G);
  for (int j = 0; j < G; ++j) {
    const double gap = (j + 1 < n_) ? q[j + 1] - q[j] : q[0] + length_ - q[n_ - 1];
    epp[j] = m_ * n_ * ghat_pow(1.0 / (n_ * gap), m_ + 1.0);
  }
  const ArrayXd g = gradient(q);
  // Samples pressed against the box with the gradient still pushing outward
  // must be frozen, else the unconstrained direction spends its descent on a
  // move the projection cancels and the rest can point uphill.
  std::vector<char> active(n_, 0);
  if (!periodic_) {
    const double edge = 1e-12 * length_;
    for (int j = 0; j < n_; ++j)
      if ((q[j] - lo_ <= edge && g[j] > 0.0) || (hi_ - q[j] <= edge && g[j] < 0.0)) active[j] = 1;
  }
  Tridiagonal t;
  t.sub = ArrayXd::Zero(n_);
  t.super = ArrayXd::Zero(n_);
  t.diag = ArrayXd::Constant(n_, 1.0 / (tau_ * n_));
  for (int j = 0; j < G; ++j) {
    const int jn = (j + 1) % n_;
    t.diag[j] += epp[j];
    t.diag[jn] += epp[j];
    if (j + 1 < n_) {
      t.super[j] -= epp[j];
      t.sub[j + 1] -= epp[j];
    }
  }
  ArrayXd rhs = -g;
  for (int j = 0; j < n_; ++j) {
    if (!active[j]) continue;
    t.diag[j] = 1.0;
    t.super[j] = 0.0;
    t.sub[j] = 0.0;
    rhs[j] = 0.0;
    if (j + 1 < n_) t.sub[j + 1] = 0.0;
    if (j > 0) t.super[j - 1] = 0.0;
  }
  ArrayXd delta;
  if (periodic_)
    delta = solve_cyclic_tridiagonal(t, -epp[n_ - 1], rhs);
  else
    delta = solve_tridiagonal(t, rhs);

  const double f0 = value(q);
  double step = 1.0;
  for (int back = 0; back < 40; ++back, step *= 0.5) {
    const ArrayXd trial = project(q + step * delta);
    if (value(trial) < f0) return trial;
  }
  return q;
}

ArrayXd QuantileObjective::minimize(const ArrayXd& start, const JkoStepOptions& opt,
                                    int* iterations) const {
  ArrayXd q = project(start);
  double f = value(q);
  ArrayXd g = gradient(q);
  int iters = 0;

  double t = 1.0 / curvature_bound(q);

  bool done = false;
  while (!done && iters < opt.max_iterations) {
    // Descent phase: projected gradient with a Barzilai-Borwein step.
    int accepted = 0;
    bool progress = false;
    while (accepted < 200 && iters < opt.max_iterations) {
      const ArrayXd trial = project(q - t * g);
      ++iters;
      const double ft = value(trial);
      if (ft < f) {
        const ArrayXd dq = trial - q;
        const ArrayXd gt = gradient(trial);
        const double num = dq.square().sum();
        const double den = (dq * (gt - g)).sum();
        if (den > 0.0) t = std::clamp(num / den, 1e-18, 1e18);
        q = trial;
        f = ft;
        g = gt;
        ++accepted;
        progress = true;
        const double pg = rms_projected_gradient(q);
        if (pg <= opt.tolerance) {
          done = true;
          break;
        }
        if (pg <= 1e3 * opt.tolerance && accepted >= 20) break;
      } else {
        t *= 0.5;
        if (t < 1e-18) break;
      }
    }
    if (done) break;

    // Newton phase: quadratic tail convergence while progress lasts.
    bool moved = false;
    for (int k = 0; k < 60 && iters < opt.max_iterations; ++k) {
      const ArrayXd next = newton_step(q);
      ++iters;
      const double fn = value(next);
      const double pg_old = rms_projected_gradient(q);
      const double pg_new = rms_projected_gradient(next);
      if (fn < f || pg_new < 0.5 * pg_old) {
        q = next;
        f = fn;
        g = gradient(q);
        moved = true;
        progress = true;
        if (pg_new <= opt.tolerance) {
          done = true;
          break;
        }
      } else {
        break;
      }
    }
    if (done) break;
    if (!progress) break;  // both phases stalled; certificates report the rest
    if (!moved) t = 1.0 / curvature_bound(q);
  }
  if (iterations) *iterations = iters;
  return q;
}

namespace {

// Mass-weighted sd of tau f'_m(rho) + psi across the quantile samples, with
// psi accumulated by exact trapezoids of the displacement along the state.
// Fourth-order first derivative with respect to the uniform rank coordinate
// s_j = (j+1/2)/n. A periodic sequence wraps with an additive period (the
// domain length for quantiles, zero for rank-periodic functions).
ArrayXd rank_derivative(const ArrayXd& y, bool periodic, double period) {
  const int n = static_cast<int>(y.size());
  ArrayXd d(n);
  if (n < 5) {
    for (int j = 0; j < n; ++j) {
      const int a = std::max(0, j - 1), b = std::min(n - 1, j + 1);
      d[j] = b > a ? (y[b] - y[a]) * n / static_cast<double>(b - a) : 0.0;
    }
    return d;
  }
  auto val = [&](int j) -> double {
    if (j < 0) return y[j + n] - period;
    if (j >= n) return y[j - n] + period;
    return y[j];
  };
  for (int j = 0; j < n; ++j) {
    if (periodic || (j >= 2 && j + 2 < n)) {
      d[j] = (val(j - 2) - 8.0 * val(j - 1) + 8.0 * val(j + 1) - val(j + 2)) * n / 12.0;
    } else if (j == 0) {
      d[j] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * n / 12.0;
    } else if (j == 1) {
      d[j] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) * n / 12.0;
    } else if (j == n - 2) {
      d[j] = (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]) * n /
             12.0;
    } else {
      d[j] = (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] +
              3.0 * y[n - 5]) *
             n / 12.0;
    }
  }
  return d;
}

struct ResidualEstimate {
  double value = 0.0;
  double kept_fraction = 1.0;
};

// Sd of tau f'_m(rho) + psi along the quantile path. Each sample carries mass
// 1/n, so uniform weights are mass weights. The density is 1/(dQ/ds) with a
// fourth-order derivative; psi accumulates (Q - Qmu) dQ by a corrected
// trapezoid whose Euler-Maclaurin term telescopes, so inaccuracies crossing a
// rough stretch shift all downstream samples by one common constant that the
// sd ignores. Samples are kept only where the local log-density moves little
// per sample: the discrete step equation fixes the gap-density chain exactly,
// and the continuum identity follows only up to tau times the squared
// per-sample log-density change, so samples beyond the resolvable range would
// report that discretization gap rather than distance from optimality.
ResidualEstimate stationarity_residual(const ArrayXd& q, const ArrayXd& qmu,
                                       const SchemeParams& prm, bool periodic, double length) {
  const int n = static_cast<int>(q.size());
  const ArrayXd qd = rank_derivative(q, periodic, length);
  const ArrayXd w = (q - qmu) * qd;
  const ArrayXd wd = rank_derivative(w, periodic, 0.0);
  const double h = 1.0 / n;
  ArrayXd trap(n);
  trap[0] = 0.0;
  for (int j = 0; j + 1 < n; ++j) trap[j + 1] = trap[j] + 0.5 * h * (w[j] + w[j + 1]);
  ArrayXd psi = trap - (h * h / 12.0) * (wd - wd[0]);

  const int gap_count = periodic ? n : n - 1;
  ArrayXd gaps(gap_count);
  for (int j = 0; j + 1 < n; ++j) gaps[j] = q[j + 1] - q[j];
  if (periodic) gaps[n - 1] = q[0] + length - q[n - 1];
  // |log gap ratio| at the sample between two consecutive gaps.
  ArrayXd roughness = ArrayXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    const int left = periodic ? (j - 1 + n) % n : j - 1;
    if (!periodic && (left < 0 || j >= gap_count)) continue;
    roughness[j] = std::abs(std::log(gaps[j] / gaps[left]));
  }

  const double cap = 0.05;
  std::vector<double> r;
  r.reserve(n);
  for (int j = 0; j < n; ++j) {
    if (qd[j] <= 0.0) continue;
    double rough = 0.0;
    if (periodic) {
      for (int k = -2; k <= 2; ++k) rough = std::max(rough, roughness[(j + k + n) % n]);
    } else {
      // One-sided stencils at the ends reach samples 0..4 (or mirrored).
      const int lo = j < 2 ? 0 : (j + 2 >= n ? n - 5 : j - 2);
      for (int k = lo; k < lo + 5; ++k)
        if (k > 0 && k < n - 1) rough = std::max(rough, roughness[k]);
    }
    if (rough > cap) continue;
    r.push_back(prm.tau * f_m_prime(1.0 / qd[j], prm.m) + psi[j]);
  }
  ResidualEstimate out;
  out.kept_fraction = static_cast<double>(r.size()) / n;
  if (r.empty()) return out;
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(r.size());
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  out.value = std::sqrt(var / static_cast<double>(r.size()));
  return out;
}

struct QuantileSolve {
  ArrayXd q;
  int iterations = 0;
  double cut = 0.0;
  double objective = 0.0;
  double residual = 0.0;
  double residual_support = 1.0;
};

QuantileSolve solve_step(const ArrayXd& qmu, const Domain& domain, const SchemeParams& prm,
                         const JkoStepOptions& opt) {
  QuantileObjective obj(qmu, domain, prm);
  QuantileSolve out;
  out.q = obj.minimize(qmu, opt, &out.iterations);

  if (domain.is_periodic()) {
    // The correspondence between state and datum samples carries a free
    // circular offset; re-anchor while a one-rank rotation lowers the
    // transport part, re-optimizing after each switch.
    const int n = static_cast<int>(qmu.size());
    const double L = domain.length(0);
    ArrayXd datum = obj.datum();
    for (int round = 0; round < 8; ++round) {
      const double base = (out.q - datum).square().sum();
      ArrayXd fwd(n), bwd(n);
      for (int j = 0; j < n; ++j) {
        fwd[j] = (j + 1 < n) ? datum[j + 1] : datum[0] + L;
        bwd[j] = (j > 0) ? datum[j - 1] : datum[n - 1] - L;
      }
      const double cf = (out.q - fwd).square().sum();
      const double cb = (out.q - bwd).square().sum();
      if (cf < base && cf <= cb) {
        datum = fwd;
        out.cut += 1.0 / n;
      } else if (cb < base) {
        datum = bwd;
        out.cut -= 1.0 / n;
      } else {
        break;
      }
      obj.set_datum(datum);
      int extra = 0;
      out.q = obj.minimize(out.q, opt, &extra);
      out.iterations += extra;
    }
    out.objective = obj.value(out.q);
    const ResidualEstimate re = stationarity_residual(out.q, obj.datum(), prm, true, L);
    out.residual = re.value;
    out.residual_support = re.kept_fraction;
  } else {
    out.objective = obj.value(out.q);
    const ResidualEstimate re = stationarity_residual(out.q, qmu, prm, false, domain.length(0));
    out.residual = re.value;
    out.residual_support = re.kept_fraction;
  }
  return out;
}

JkoStepResult materialize(const QuantileSolve& sol, const GridDensity& rho_prev,
                          const SchemeParams& prm) {
  const Grid& grid = rho_prev.grid;
  JkoStepResult step;
  step.quantile.samples = sol.q;
  step.objective = sol.objective;
  step.optimality_residual = sol.residual;
  step.residual_support = sol.residual_support;
  step.iterations = sol.iterations;
  step.cut = sol.cut;

  if (grid.domain.is_periodic()) {
    const double L = grid.domain.length(0);
    const double lo = grid.domain.lo[0];
    ArrayXd qw = sol.q - L * std::floor((sol.q[0] - lo) / L);
    step.rho_next = quantile_to_density_torus(QuantileFunction{qw}, grid);
    CircleOtResult back = circle_ot(step.rho_next, rho_prev);
    step.map = back.map;
    step.potentials = back.potentials;
    step.circulation_defect = back.periodic_defect;
  } else {
    step.rho_next = quantile_to_density(QuantileFunction{sol.q}, grid);
    step.map = monotone_map(step.rho_next, rho_prev);
    step.potentials = brenier_potential_from_map(step.map);
  }
  (void)prm;
  return step;
}

}  // namespace

JkoStepResult jko_step_1d(const GridDensity& rho_prev, const SchemeParams& prm,
                          const JkoStepOptions& opt) {
  const Grid& grid = rho_prev.grid;
  if (grid.domain.dim != 1) throw std::invalid_argument("jko_step_1d needs a 1d grid");
  prm.validate(grid.domain);
  if (std::abs(rho_prev.mass() - 1.0) > 1e-9)
    throw std::invalid_argument("datum must have unit mass");
  const int N = opt.quantile_resolution > 0 ? opt.quantile_resolution : 4 * grid.size;
  const ArrayXd qmu = density_to_quantile(rho_prev, N).samples;
  const QuantileSolve sol = solve_step(qmu, grid.domain, prm, opt);
  return materialize(sol, rho_prev, prm);
}

std::vector<JkoStepResult> run_scheme_1d(const GridDensity& rho0, const SchemeParams& prm,
                                         int steps, const JkoStepOptions& opt) {
  const Grid& grid = rho0.grid;
  if (grid.domain.dim != 1) throw std::invalid_argument("run_scheme_1d needs a 1d grid");
  prm.validate(grid.domain);
  if (std::abs(rho0.mass() - 1.0) > 1e-9)
    throw std::invalid_argument("datum must have unit mass");
  if (steps < 1) throw std::invalid_argument("need at least one step");
  const int N = opt.quantile_resolution > 0 ? opt.quantile_resolution : 4 * grid.size;

  std::vector<JkoStepResult> out;
  out.reserve(static_cast<size_t>(steps));
  ArrayXd qstate = density_to_quantile(rho0, N).samples;
  GridDensity prev = rho0;
  for (int k = 0; k < steps; ++k) {
    const QuantileSolve sol = solve_step(qstate, grid.domain, prm, opt);
    JkoStepResult step = materialize(sol, prev, prm);
    if (std::abs(step.rho_next.mass() - 1.0) > 1e-6)
      throw std::runtime_error("mass drifted during the scheme");
    qstate = sol.q;
    prev = step.rho_next;
    out.push_back(std::move(step));
  }
  return out;
}

double quadratic_deviation_check(const TransportMap1D& map, double circulation_defect) {
  const Grid& grid = map.source;
  const bool periodic = grid.domain.is_periodic();
  const double L = grid.domain.length(0);
  const double slope = periodic ? circulation_defect / L : 0.0;
  const Eigen::Index K = map.knots_x.size();

  // Displacement x - T(x) (less the distributed closure slope) on the knots.
  ArrayXd D(K);
  for (Eigen::Index k = 0; k < K; ++k) D[k] = map.knots_x[k] - map.knots_t[k] - slope;

  // Fixed point: a sign change of the piecewise-linear displacement.
  double x0 = map.knots_x[0];
  bool found = false;
  for (Eigen::Index k = 0; k + 1 < K && !found; ++k) {
    const double a = D[k], b = D[k + 1];
    if (a == 0.0) {
      x0 = map.knots_x[k];
      found = true;
    } else if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
      const double t = a / (a - b);
      x0 = map.knots_x[k] + t * (map.knots_x[k + 1] - map.knots_x[k]);
      found = true;
    }
  }
  if (!found) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < K; ++k)
      if (std::abs(D[k]) < std::abs(D[best])) best = k;
    x0 = map.knots_x[best];
  }

  // psi up to a constant: exact trapezoid prefix of the piecewise-linear D.
  ArrayXd P(K);
  P[0] = 0.0;
  for (Eigen::Index k = 0; k + 1 < K; ++k)
    P[k + 1] = P[k] + 0.5 * (map.knots_x[k + 1] - map.knots_x[k]) * (D[k] + D[k + 1]);
  auto psi_at = [&](double x) {
    Eigen::Index lo = 0, hi = K - 1;
    while (lo + 1 < hi) {
      const Eigen::Index mid = (lo + hi) / 2;
      if (map.knots_x[mid] <= x)
        lo = mid;
      else
        hi = mid;
    }
    const double xa = map.knots_x[lo], xb = map.knots_x[lo + 1];
    const double da = D[lo], db = D[lo + 1];
    const double t = (xb > xa) ? (x - xa) / (xb - xa) : 0.0;
    const double dmid = da + (db - da) * t;
    return P[lo] + 0.5 * (x - xa) * (da + dmid);
  };

  const double psi0 = psi_at(x0);
  double worst = -1e300;
  for (int i = 0; i < grid.size; ++i) {
    const double x = grid.center(0, i);
    const double d = periodic ? wrapped_distance(x, x0, L) : std::abs(x - x0);
    worst = std::max(worst, psi_at(x) - psi0 - 0.5 * d * d);
  }
  return worst;
}

ArrayXd stability_probe(const ArrayXd& q, const Domain& domain) {
  const int n = static_cast<int>(q.size());
  const bool periodic = domain.is_periodic();
  ArrayXd gaps(periodic ? n : n - 1);
  for (int j = 0; j + 1 < n; ++j) gaps[j] = q[j + 1] - q[j];
  if (periodic) gaps[n - 1] = q[0] + domain.length(0) - q[n - 1];
  return gaps;
}

}  // namespace jkolab

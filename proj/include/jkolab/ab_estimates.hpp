#pragma once

#include <vector>

#include "jkolab/entropy.hpp"
#include "jkolab/jko1d.hpp"
#include "jkolab/ma_measure.hpp"

namespace jkolab {

// Exponent beta = d*(m-1) + 2 appearing in the determinant-bound recursion
// and in the decay rates; positive exactly above the mass-critical m.
inline double ab_exponent(int d, double m) { return d * (m - 1.0) + 2.0; }

// Decay constant alpha = d / (d*(m-1) + 2): self-similar solutions spread
// like t^{alpha/d} and pressures satisfy lap p >= -alpha/t.
inline double ab_constant(int d, double m) { return d / ab_exponent(d, m); }

// F(X) = X / (1-X)^beta with beta = ab_exponent(d, m). Increasing bijection
// from [0,1) onto [0,inf) with F(X) >= X. Throws for X outside [0,1) or for
// m at or below the mass-critical exponent.
double ab_F(double X, int d, double m);

// Inverse bijection: the unique X in [0,1) with F(X) = Y. Bisection to
// |F(X) - Y| <= tol * max(1, Y), then one Newton polish. Throws for Y < 0.
double ab_F_inverse(double Y, int d, double m, double tol = 1e-13);

// X_1 = 1 and X_{k+1} = F^{-1}(X_k): the per-step lower bound 1 - X_k on
// det(D^2 u_k)^{1/d} along the minimizing-movement scheme. X_k decreases
// strictly to 0 with k * beta * X_k -> 1.
struct ABSequence {
  int d = 1;
  double m = 1.0;
  double exponent = 2.0;  // beta = d*(m-1) + 2
  double alpha = 0.5;     // d / beta
  ArrayXd X;              // X[k-1] = X_k, X[0] = 1
  ArrayXd diagnostic;     // k * beta * X_k, tends to 1
};

ABSequence ab_sequence(int d, double m, int count);

struct ABCheckOptions {
  double t_start = 0.0;    // time of the initial density; step k sits at t_start + k*tau
  double t0 = 0.0;         // decay bound checked only for t >= t0
  double epsilon = 0.1;    // tolerance factor in lap p >= -(1+eps)*alpha/t
  double positivity = 0.0; // support threshold for m <= 1 (vacuum excluded)
};

// Per-step certificate for u_k = |x|^2/2 + tau * f_m'(rho_k): convexity
// defect, Monge-Ampere measure bound at lambda = 1 - X_k, the weak
// Laplacian bound it implies, the pressure bound lap p >= -d*X_k/tau, and
// the decay bound lap p >= -(1+eps)*alpha/t once t >= t0.
struct ABStepReport {
  int k = 0;
  double t = 0.0;
  double lambda = 0.0;
  double delta_conv = 0.0;
  double min_det_root = 0.0;  // min over window cells of (mass / volume)^(1/d)
  bool ma_ok = false;
  double ma_slack = 0.0;
  double ma_worst_ratio = 0.0;
  bool lap_u_ok = false;
  double lap_u_margin = 0.0;
  bool lap_p_ok = false;
  double lap_p_margin = 0.0;
  bool decay_ok = true;  // true when t < t0 (not checked)
  double decay_margin = 0.0;
  bool chain_ok = false;  // ma -> lap u -> lap p implications hold
  double sup_density = 0.0;
};

struct ABReport {
  std::vector<ABStepReport> steps;
  bool all_ok = false;
  // Cell range of the positive support used for the checks (m <= 1 only;
  // full grid otherwise).
  int support_lo = 0;
  int support_hi = -1;
};

// Runs the certificate on every step of a 1d trajectory. For m <= 1 the
// checks are restricted to the largest contiguous block of cells with
// rho > positivity (periodic domains must be positive everywhere).
ABReport ab_check_trajectory(const std::vector<JkoStepResult>& trajectory,
                            const SchemeParams& params, const ABCheckOptions& options = {});

// Sup bound from local mass: if lap p >= -K on B_2r(x) then rho(x) <= M
// with M built from the mean of rho over B_r via Jensen. Branches:
//   m = 1:      M = exp(c_d K r^2) / (omega_d r^d)
//   m < 1:      M = S^{1/(m-1)},  S = (omega_d r^d)^{1-m} - c_d K r^2
//   1 < m <= 2: M = ((omega_d r^d)^{1-m} + c_d K r^2)^{1/(m-1)}
// with c_d = d/(d+2) and omega_d the unit-ball volume. Returns NaN when the
// bound degenerates (S <= 0 for m < 1, or m > 2 where the mean-value step
// needs concavity of z^{m-1}). Requires m above the mass-critical exponent.
double l1_linfty_bound(double m, int d, double K, double r);

struct LinftyRecord {
  int k = 0;
  double t = 0.0;
  double sup_on_ball = 0.0;  // max of rho_k over B_r(center)
  double K = 0.0;            // d * X_k / tau, the certified pressure bound
  double M = 0.0;            // l1_linfty_bound(m, d, K, r)
  bool ok = false;           // sup_on_ball <= M
};

struct LinftyCheckReport {
  double sup_norm = 0.0;  // max over scanned steps of sup_on_ball
  double bound_M = 0.0;   // bound at the first scanned step (largest K)
  bool ok = false;
  std::vector<LinftyRecord> records;
};

// Checks the sup bound against a 1d trajectory on the ball B_r(center) for
// every step with t = t_start + k*tau >= t0, taking K = d*X_k/tau from the
// determinant-bound sequence. Throws unless B_2r(center) fits inside the
// domain.
LinftyCheckReport linfty_bound_check(const std::vector<JkoStepResult>& trajectory,
                                     const SchemeParams& params, double center, double radius,
                                     double t0, const ABCheckOptions& options = {});

}  // namespace jkolab

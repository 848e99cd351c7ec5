#pragma once

#include <vector>

#include "jkolab/density.hpp"
#include "jkolab/types.hpp"

namespace jkolab {

// Entropic transport plan between two densities on one grid, cost
// |x - y|^2 / 2 with per-axis wrapped differences on periodic axes. The plan
// itself is never materialized: it is (a (x) b) exp((alpha + beta - c) / eps)
// for the cell mass vectors a, b, and every contraction against it runs
// through per-axis log-sum-exp passes.
struct EntropicPlan {
  Grid grid;
  double eps = 0.0;
  ArrayXd alpha;  // dual potential on the first density's cells
  ArrayXd beta;   // dual potential on the second density's cells
  double value = 0.0;  // dual objective <a, alpha> + <b, beta>
  double cost = 0.0;   // transport part <plan, c>
  double marginal_error_rho = 0.0;  // L1 defect of the first marginal
  double marginal_error_mu = 0.0;   // L1 defect of the second marginal
  int iterations = 0;
};

struct SinkhornOptions {
  int max_iterations = 20000;
  // Cold starts first solve a geometric ladder of larger regularizations and
  // carry the duals down; warm starts skip the ladder.
  bool ladder = true;
  const ArrayXd* warm_alpha = nullptr;
  const ArrayXd* warm_beta = nullptr;
  // Skip the <plan, c> contraction (two extra passes) when only duals and the
  // dual value are needed, as in inner optimization loops.
  bool want_cost = true;
};

// Log-domain alternating dual ascent until both marginal L1 defects are at or
// below tol. The first marginal is exact after the closing half-sweep; the
// second carries the measured defect. Throws on non-convergence at the
// iteration cap and on mass mismatch between the densities.
EntropicPlan sinkhorn(const GridDensity& rho, const GridDensity& mu, double eps, double tol,
                      const SinkhornOptions& opt = {});

// Symmetric self-transport dual for debiasing: the fixed point of
// gamma = -eps log sum_y a_y exp((gamma_y - c(x, y)) / eps),
// reached by damped half-averaged updates. Self value = 2 <a, gamma>.
ArrayXd self_potential(const GridDensity& rho, double eps, double tol,
                       const SinkhornOptions& opt = {});

// Debiased squared-distance surrogate on the W2^2 scale:
//   2 [ OT_eps(rho, mu) - OT_eps(rho, rho) / 2 - OT_eps(mu, mu) / 2 ]
// with OT_eps the dual value at cost d^2 / 2. Nonnegative, zero at rho = mu,
// and converging to the squared Wasserstein distance as eps -> 0.
double sinkhorn_divergence(const GridDensity& rho, const GridDensity& mu, double eps, double tol);

// Conditional plan barycenters T(x) = sum_y y plan(x, y) / a(x). Periodic
// axes average on the circle and reduce the angle back to the fundamental
// domain; a circular mean whose resultant is shorter than the stability
// radius is ill-defined (antipodal mass split) and flags the cell instead of
// failing. Cells with no mass keep their own center, unflagged.
struct BarycentricMap {
  Grid grid;
  ArrayXd tx, ty;  // image coordinates per source cell; ty is empty in 1D
  std::vector<uint8_t> flagged;

  Vector2d image2(int cell) const { return {tx[cell], ty[cell]}; }
};

BarycentricMap barycentric_map(const EntropicPlan& plan, const GridDensity& rho,
                               const GridDensity& mu);

struct BoundaryReport {
  double corner_err = 0.0;  // max distance of a corner cell's image to its corner
  double face_err = 0.0;    // max normal displacement over non-corner edge cells
};

// No-flux fingerprint of a map on a non-periodic 2D grid: corner cells should
// stay put and edge cells should slide along their face, so both errors
// vanish as eps and h do.
BoundaryReport boundary_behavior_check(const BarycentricMap& map);

}  // namespace jkolab

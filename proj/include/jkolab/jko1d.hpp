#pragma once

#include <vector>

#include "jkolab/density.hpp"
#include "jkolab/entropy.hpp"
#include "jkolab/ot1d.hpp"
#include "jkolab/quantile.hpp"

namespace jkolab {

struct JkoStepOptions {
  int quantile_resolution = 0;  // sample count; 0 picks 4x the grid cell count
  double tolerance = 1e-9;      // rms projected-gradient target
  int max_iterations = 50000;   // combined descent and Newton budget
};

// One minimizing-movement iterate with its certificates.
struct JkoStepResult {
  GridDensity rho_next;
  QuantileFunction quantile;
  TransportMap1D map;        // transport from rho_next back to the datum
  PotentialPair potentials;  // Kantorovich pair of that transport
  double circulation_defect = 0.0;  // periodic closure residue (periodic only)
  double objective = 0.0;
  // Mass-weighted sd of tau f'_m(rho) + psi over the quantile samples whose
  // neighborhood resolves the density (bounded log-slope per sample); zero
  // exactly at a stationary point of the continuum step.
  double optimality_residual = 0.0;
  // Mass fraction carried by the samples entering the residual. Below 1 only
  // where the density decays too fast for adjacent samples to resolve it.
  double residual_support = 1.0;
  int iterations = 0;
  double cut = 0.0;  // rank offset of the circle correspondence (periodic only)
};

// Discrete minimizing-movement objective in quantile coordinates. The state
// is the vector of quantile samples at ranks (j+1/2)/N; each inter-sample gap
// carries mass 1/N at density 1/(N dQ). On a circle the wrap gap closes the
// chain, so every sample has two incident gaps.
class QuantileObjective {
 public:
  QuantileObjective(ArrayXd datum, const Domain& domain, const SchemeParams& prm);

  double value(const ArrayXd& q) const;
  ArrayXd gradient(const ArrayXd& q) const;

  // Euclidean projection onto the feasible set: monotone with every gap at
  // least the floor, inside the box on an interval, wrap gap at least the
  // floor on a circle. Exact via an isotonic fit in shifted coordinates.
  ArrayXd project(const ArrayXd& q) const;

  double rms_projected_gradient(const ArrayXd& q) const;

  // Largest diagonal curvature of the objective at q; its inverse is a safe
  // gradient step.
  double curvature_bound(const ArrayXd& q) const;

  // One damped Newton step (tridiagonal solve, cyclic on a circle); returns
  // q unchanged when no decrease is found.
  ArrayXd newton_step(const ArrayXd& q) const;

  // Minimize from the given start; returns the iterate and spends the
  // iteration budget in opt. The datum is the canonical start.
  ArrayXd minimize(const ArrayXd& start, const JkoStepOptions& opt, int* iterations) const;

  const ArrayXd& datum() const { return datum_; }
  void set_datum(ArrayXd datum);
  double gap_floor() const { return gap_floor_; }
  bool periodic() const { return periodic_; }

 private:
  ArrayXd datum_;
  double m_;
  double tau_;
  bool periodic_;
  double lo_, hi_, length_;
  double gap_floor_;
  int n_;
};

JkoStepResult jko_step_1d(const GridDensity& rho_prev, const SchemeParams& prm,
                          const JkoStepOptions& opt = {});

std::vector<JkoStepResult> run_scheme_1d(const GridDensity& rho0, const SchemeParams& prm,
                                         int steps, const JkoStepOptions& opt = {});

// Max over cells of psi(x) - psi(x0) - d(x, x0)^2 / 2 taken at a fixed point
// x0 of the induced map; nonpositive up to roundoff for any monotone map, so
// a positive return beyond roundoff falsifies convexity of x^2/2 - psi.
double quadratic_deviation_check(const TransportMap1D& map, double circulation_defect = 0.0);

// Gap vector of a quantile state (wrap gap appended on a circle); entries
// near the floor flag degenerating resolution.
ArrayXd stability_probe(const ArrayXd& q, const Domain& domain);

}  // namespace jkolab

#pragma once

#include "jkolab/density.hpp"

namespace jkolab {

// Closed-form self-similar solutions used as references and initial data.
enum class ProfileKind { GaussianHeat, BarenblattPme, BarenblattFde };

struct ExactProfile {
  ProfileKind kind = ProfileKind::GaussianHeat;
  double m = 1.0;
  int dim = 1;
  Vector2d center{0.0, 0.0};
  // Self-similar constants (Barenblatt only): beta = 1/(d(m-1)+2),
  // kappa = |m-1| beta / (2m), amplitude A normalized to unit mass.
  double beta = 0.0;
  double kappa = 0.0;
  double amplitude = 0.0;

  static ExactProfile gaussian_heat(int dim, Vector2d center = {0.0, 0.0});
  static ExactProfile barenblatt_pme(double m, int dim, Vector2d center = {0.0, 0.0});
  static ExactProfile barenblatt_fde(double m, int dim, Vector2d center = {0.0, 0.0});

  double value(double x, double t) const;            // 1D
  double value(const Vector2d& x, double t) const;   // any dim
  // Edge of the support at time t (PME); infinity otherwise.
  double support_radius(double t) const;
  // d * beta = d/(d(m-1)+2): the pressure of the profile satisfies
  // lap p = -alpha/t inside its support.
  double alpha() const;
};

// Unit mass at t=1 of the Barenblatt shape with amplitude A (quadrature).
double barenblatt_mass(double m, int dim, double A);
// Amplitude giving unit mass, found by bisection on barenblatt_mass.
double barenblatt_amplitude(double m, int dim);

// Per-cell averages of the profile at time t (tensor Gauss panels; in 1D the
// support edge is split exactly, so compactly supported shapes integrate to
// machine accuracy). Raw values: callers decide whether to renormalize.
ArrayXd sample_cell_averages(const ExactProfile& profile, const Grid& grid, double t);
// Cell averages rescaled to exact unit mass on the grid.
GridDensity sample_normalized(const ExactProfile& profile, const Grid& grid, double t);

// Inverse standard normal cdf, accurate to ~1e-14 on (0, 1) (rational seed
// plus Newton refinement through erfc).
double standard_normal_quantile(double p);

}  // namespace jkolab

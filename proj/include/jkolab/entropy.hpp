#pragma once

#include <utility>

#include "jkolab/density.hpp"

namespace jkolab {

// Densities at or below this floor are treated as the floor inside logs and
// negative powers (m <= 1 branches only).
inline constexpr double kPositivityFloor = 1e-300;

// Critical exponents for diffusion on d-dimensional space.
inline double m_crit_mass(int d) { return 1.0 - 2.0 / d; }          // finite mass
inline double m_crit_moment(int d) { return 1.0 - 2.0 / (d + 2); }  // finite 2nd moment
inline double m_crit_geodesic(int d) { return 1.0 - 1.0 / d; }      // displacement convexity

struct SchemeParams {
  double m = 1.0;
  double tau = 1e-2;
  int dim = 1;

  // Requires m > 0, tau > 0 and, on truncations of unbounded domains,
  // m above the mass-critical exponent.
  void validate(const Domain& domain) const;
};

// Integrand of the internal energy: z^m/(m-1) for m != 1, z*log z for m = 1.
// f_m(0) = 0 for m >= 1; for m < 1 the value at 0 is 0 as a limit but the
// derivative blows up, so zero arguments are floored.
double f_m(double z, double m);
double f_m_prime(double z, double m);

// Legendre conjugate sup_z {z*s - f_m(z)}. Piecewise: +inf (returned as
// infinity) where the sup diverges. The prefactor is computed from the
// closed form below and is unit-tested against direct maximization.
double f_m_conjugate(double s, double m);
// c_m = |m-1|^{1/(m-1)} * |m^{1/(1-m)} - m^{m/(1-m)}|, the coefficient in
// f_m^*(s) = c_m * |s|^{m/(m-1)} on its finite branch.
double conjugate_prefactor(double m);

// Pressure field m/(m-1) * rho^{m-1} (m != 1) or log(rho) (m = 1).
ArrayXd pressure(const ArrayXd& rho, double m);
inline ArrayXd pressure(const GridDensity& rho, double m) {
  return pressure(rho.values, m);
}

// Midpoint quadrature of f_m(rho) over the grid.
double entropy(const ArrayXd& rho, const Grid& grid, double m);
inline double entropy(const GridDensity& rho, double m) {
  return entropy(rho.values, rho.grid, m);
}

// Mass-preserving dilation eta(x) = M^{d/2} rho(sqrt(M) x) realized on a
// 1/sqrt(M)-rescaled grid. Returns the two sides of the scaling identity:
// (E[eta], E[rho]*M^{d(m-1)/2}) for m != 1, (E[eta], E[rho] + (d/2) log M)
// for m = 1. Only defined on truncations of unbounded domains.
struct ScalingCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  GridDensity rescaled;
};
ScalingCheck entropy_scaling_check(const GridDensity& rho, double M, double m);

}  // namespace jkolab

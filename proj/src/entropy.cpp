#include "jkolab/entropy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace jkolab {

void SchemeParams::validate(const Domain& domain) const {
  if (!(m > 0.0)) throw std::invalid_argument("diffusion exponent m must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("time step tau must be positive");
  if (dim != domain.dim) throw std::invalid_argument("params dim does not match domain");
  if (m <= m_crit_mass(domain.dim))
    throw std::invalid_argument("diffusion exponent at or below the mass-critical value");
  // Truncations of unbounded domains additionally need finite second moments.
  if (!domain.physical_boundary() && !domain.is_periodic() &&
      m <= m_crit_moment(domain.dim))
    throw std::invalid_argument(
        "diffusion exponent at or below the moment-critical value on an "
        "unbounded domain");
}

double f_m(double z, double m) {
  if (z < 0.0) throw std::domain_error("f_m needs z >= 0");
  if (m == 1.0) return z <= kPositivityFloor ? 0.0 : z * std::log(z);
  if (m > 1.0) return std::pow(z, m) / (m - 1.0);
  // m < 1: the limit at 0 is 0 but derivatives diverge; floor the argument.
  return std::pow(std::max(z, kPositivityFloor), m) / (m - 1.0);
}

double f_m_prime(double z, double m) {
  if (z < 0.0) throw std::domain_error("f_m_prime needs z >= 0");
  if (m == 1.0) return std::log(std::max(z, kPositivityFloor)) + 1.0;
  if (m > 1.0) return m / (m - 1.0) * std::pow(z, m - 1.0);
  return m / (m - 1.0) * std::pow(std::max(z, kPositivityFloor), m - 1.0);
}

double conjugate_prefactor(double m) {
  if (m == 1.0 || !(m > 0.0))
    throw std::domain_error("conjugate prefactor defined for m > 0, m != 1");
  const double a = std::pow(std::abs(m - 1.0), 1.0 / (m - 1.0));
  const double b = std::abs(std::pow(m, 1.0 / (1.0 - m)) - std::pow(m, m / (1.0 - m)));
  return a * b;
}

double f_m_conjugate(double s, double m) {
  const double inf = std::numeric_limits<double>::infinity();
  if (m == 1.0) return std::exp(s - 1.0);  // sup_z {z s - z log z}
  const double cm = conjugate_prefactor(m);
  if (m > 1.0) {
    // Finite everywhere; zero for s <= 0 (sup attained at z = 0).
    if (s <= 0.0) return 0.0;
    return cm * std::pow(s, m / (m - 1.0));
  }
  // m < 1: finite only for s < 0; exponent m/(m-1) < 0.
  if (s >= 0.0) return inf;
  return cm * std::pow(-s, m / (m - 1.0));
}

ArrayXd pressure(const ArrayXd& rho, double m) {
  ArrayXd p(rho.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i) p[i] = f_m_prime(rho[i], m);
  if (m == 1.0) p -= 1.0;  // pressure log(rho); f' = log(rho) + 1
  return p;
}

double entropy(const ArrayXd& rho, const Grid& grid, double m) {
  if (rho.size() != grid.size) throw std::invalid_argument("field size mismatch");
  double s = 0.0;
  for (int i = 0; i < grid.size; ++i) s += f_m(rho[i], m);
  return s * grid.cell_volume;
}

ScalingCheck entropy_scaling_check(const GridDensity& rho, double M, double m) {
  if (!(M > 0.0)) throw std::invalid_argument("scaling mass M must be positive");
  if (rho.grid.domain.physical_boundary())
    throw std::invalid_argument(
        "entropy scaling applies to truncations of unbounded domains only");
  const Grid& g = rho.grid;
  const int d = g.dim();
  const double root = std::sqrt(M);

  Domain scaled = g.domain;
  for (int a = 0; a < d; ++a) {
    scaled.lo[a] = g.domain.lo[a] / root;
    scaled.hi[a] = g.domain.hi[a] / root;
  }
  Grid sg = build_grid(scaled, g.n);
  // Center of scaled cell i is center(i)/sqrt(M), so eta on the scaled grid
  // is the cellwise map below; the quadrature identity is then exact.
  ArrayXd eta = std::pow(M, 0.5 * d) * rho.values;

  ScalingCheck out;
  out.lhs = entropy(eta, sg, m);
  const double e_rho = entropy(rho, m);
  out.rhs = (m == 1.0) ? e_rho + 0.5 * d * std::log(M)
                       : e_rho * std::pow(M, 0.5 * d * (m - 1.0));
  out.rescaled = GridDensity::unchecked(std::move(sg), std::move(eta));
  return out;
}

}  // namespace jkolab

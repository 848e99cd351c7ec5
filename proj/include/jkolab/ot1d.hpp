#pragma once

#include <vector>

#include "jkolab/density.hpp"
#include "jkolab/quantile.hpp"

namespace jkolab {

// Monotone transport map stored as values at cell centers plus the full
// piecewise-linear graph (knots), which makes potential integration exact.
struct TransportMap1D {
  Grid source;
  ArrayXd image;    // T at cell centers; lifted (not wrapped) on the torus
  ArrayXd knots_x;  // breakpoints, ascending, spanning [lo, hi]
  ArrayXd knots_t;  // T at the breakpoints, nondecreasing
};

// Kantorovich pair for the cost d(x,y)^2/2 together with the convex sides
// u = |x|^2/2 - psi and v = |y|^2/2 - phi, all sampled at cell centers.
struct PotentialPair {
  ArrayXd psi;
  ArrayXd phi;
  ArrayXd u;
  ArrayXd v;
};

struct Atom {
  double x;
  double w;
};

struct Atom2 {
  Vector2d x;
  double w;
};

// T = Q_mu o F_rho between densities on one shared non-periodic 1D grid;
// exact for cellwise-constant densities.
TransportMap1D monotone_map(const GridDensity& rho, const GridDensity& mu);

// u(x) = int_lo^x T by trapezoid over the knots (exact: T is linear between
// them), u(lo) = 0; psi = x^2/2 - u; phi by exhaustive c-transform on grid
// points; v = y^2/2 - phi.
PotentialPair brenier_potential_from_map(const TransportMap1D& map);

// min_i { d(x_i, y)^2/2 - psi_i } at every grid point y (wrapped metric on
// periodic grids); also available at an off-grid point.
ArrayXd c_transform(const ArrayXd& psi, const Grid& grid);
double c_transform_at(const ArrayXd& psi, const Grid& grid, double y);

// Exact cost of the dense transportation problem min <gamma, cost> over
// couplings of a and b (successive shortest paths). Small instances only.
double transport_cost_matrix(const MatrixXd& cost, const VectorXd& a, const VectorXd& b);

// Exact W2 between small weighted atom lists (<= 32 atoms each).
double w2_bruteforce(const std::vector<Atom>& a, const std::vector<Atom>& b);
double w2_bruteforce_torus1(const std::vector<Atom>& a, const std::vector<Atom>& b,
                            double period);
double w2_bruteforce_2d(const std::vector<Atom2>& a, const std::vector<Atom2>& b);
double w2_bruteforce_torus2(const std::vector<Atom2>& a, const std::vector<Atom2>& b,
                            double period);

struct CircleOtResult {
  TransportMap1D map;        // image/knots lifted: displacements stay in [-L/2, L/2]
  PotentialPair potentials;  // psi periodic after defect distribution
  double cost;               // transport cost, = W2^2/2 of the sampled measures
  double cut;                // optimal rank offset
  double periodic_defect;    // |circulation of x - T| before distribution
};

// Optimal transport on the circle: the rank offset is located by a mean-
// displacement bisection, a 256-point scan, and golden-section refinement.
// N = 0 picks 4x the cell count.
CircleOtResult circle_ot(const GridDensity& rho, const GridDensity& mu, int N = 0);

}  // namespace jkolab

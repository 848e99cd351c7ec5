#pragma once

#include <array>
#include <string>
#include <vector>

#include "jkolab/types.hpp"

namespace jkolab {

// Computational domains. Truncated* kinds are finite boxes standing in for
// unbounded domains; they behave like boxes numerically but remember what they
// truncate, so rescaling and validity checks can tell the two apart.
enum class DomainKind {
  Interval,
  Torus1,
  Torus2,
  Square,
  Box2,
  TruncatedLine,
  TruncatedHalfLine,
  TruncatedPlane,
  TruncatedQuarterPlane,
};

const char* domain_kind_name(DomainKind kind);

struct Domain {
  DomainKind kind = DomainKind::Interval;
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<bool, 2> periodic{false, false};

  static Domain interval(double a, double b);
  static Domain torus1(double length = 1.0);
  static Domain torus2(double length = 1.0);
  static Domain square();
  static Domain box2(double ax, double bx, double ay, double by);
  static Domain truncated_line(double radius);
  static Domain truncated_half_line(double radius);
  static Domain truncated_plane(double radius);
  static Domain truncated_quarter_plane(double radius);

  // True for domains whose boundary is physical (box walls, torus gluing);
  // false for truncations of unbounded domains, where the boundary is an
  // artifact of the cutoff.
  bool physical_boundary() const;
  bool is_periodic() const { return periodic[0]; }
  double length(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const;
  double diameter() const;
  void validate() const;
};

// Cell-centered uniform grid. Cells are indexed x-fastest; cell i along an
// axis spans [lo + i*h, lo + (i+1)*h] with center lo + (i+1/2)*h.
struct Grid {
  Domain domain;
  std::array<int, 2> n{0, 1};
  std::array<double, 2> h{0.0, 0.0};
  int size = 0;
  double cell_volume = 0.0;

  int dim() const { return domain.dim; }
  int index(int ix, int iy) const { return ix + n[0] * iy; }
  int ix(int i) const { return i % n[0]; }
  int iy(int i) const { return i / n[0]; }
  double center(int axis, int i_axis) const {
    return domain.lo[axis] + (i_axis + 0.5) * h[axis];
  }
  double edge(int axis, int i_axis) const {
    return domain.lo[axis] + i_axis * h[axis];
  }
  Vector2d center2(int i) const {
    return {center(0, ix(i)), dim() == 2 ? center(1, iy(i)) : 0.0};
  }
  // Periodic index arithmetic; precondition: the axis is periodic or the
  // shifted index stays in range.
  int wrap(int axis, int i_axis) const;
  ArrayXd centers(int axis) const;
  // Flattened per-cell coordinate arrays (size() entries).
  ArrayXd cell_coord(int axis) const;

  bool same_layout(const Grid& other) const;
};

Grid build_grid(const Domain& domain, std::array<int, 2> n_cells);
inline Grid build_grid(const Domain& domain, int nx) {
  return build_grid(domain, {nx, domain.dim == 2 ? nx : 1});
}

enum class CellClass { Interior, Face, Corner };

struct BoundaryClassification {
  std::vector<CellClass> tag;            // per cell
  std::vector<std::array<int, 2>> normal;  // outward normal, faces only; {0,0} otherwise
  int count(CellClass c) const;
};

// Tags each cell by how its closed cell touches the domain boundary. Periodic
// axes contribute no boundary; fully periodic domains are all Interior. In 1D
// the two end cells count as corners (the endpoints are the corners of the
// interval).
BoundaryClassification classify_boundary(const Grid& grid);

}  // namespace jkolab

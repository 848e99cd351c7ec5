#include "jkolab/domain.hpp"

#include <cmath>
#include <stdexcept>

namespace jkolab {

const char* domain_kind_name(DomainKind kind) {
  switch (kind) {
    case DomainKind::Interval: return "interval";
    case DomainKind::Torus1: return "torus1";
    case DomainKind::Torus2: return "torus2";
    case DomainKind::Square: return "square";
    case DomainKind::Box2: return "box2";
    case DomainKind::TruncatedLine: return "truncated_line";
    case DomainKind::TruncatedHalfLine: return "truncated_half_line";
    case DomainKind::TruncatedPlane: return "truncated_plane";
    case DomainKind::TruncatedQuarterPlane: return "truncated_quarter_plane";
  }
  return "unknown";
}

Domain Domain::interval(double a, double b) {
  Domain d;
  d.kind = DomainKind::Interval;
  d.dim = 1;
  d.lo = {a, 0.0};
  d.hi = {b, 1.0};
  d.validate();
  return d;
}

Domain Domain::torus1(double length) {
  Domain d;
  d.kind = DomainKind::Torus1;
  d.dim = 1;
  d.lo = {0.0, 0.0};
  d.hi = {length, 1.0};
  d.periodic = {true, false};
  d.validate();
  return d;
}

Domain Domain::torus2(double length) {
  Domain d;
  d.kind = DomainKind::Torus2;
  d.dim = 2;
  d.lo = {0.0, 0.0};
  d.hi = {length, length};
  d.periodic = {true, true};
  d.validate();
  return d;
}

Domain Domain::square() { return box2(0.0, 1.0, 0.0, 1.0); }

Domain Domain::box2(double ax, double bx, double ay, double by) {
  Domain d;
  d.kind = (ax == 0.0 && ay == 0.0 && bx == 1.0 && by == 1.0)
               ? DomainKind::Square
               : DomainKind::Box2;
  d.dim = 2;
  d.lo = {ax, ay};
  d.hi = {bx, by};
  d.validate();
  return d;
}

Domain Domain::truncated_line(double radius) {
  Domain d;
  d.kind = DomainKind::TruncatedLine;
  d.dim = 1;
  d.lo = {-radius, 0.0};
  d.hi = {radius, 1.0};
  d.validate();
  return d;
}

Domain Domain::truncated_half_line(double radius) {
  Domain d;
  d.kind = DomainKind::TruncatedHalfLine;
  d.dim = 1;
  d.lo = {0.0, 0.0};
  d.hi = {radius, 1.0};
  d.validate();
  return d;
}

Domain Domain::truncated_plane(double radius) {
  Domain d;
  d.kind = DomainKind::TruncatedPlane;
  d.dim = 2;
  d.lo = {-radius, -radius};
  d.hi = {radius, radius};
  d.validate();
  return d;
}

Domain Domain::truncated_quarter_plane(double radius) {
  Domain d;
  d.kind = DomainKind::TruncatedQuarterPlane;
  d.dim = 2;
  d.lo = {0.0, 0.0};
  d.hi = {radius, radius};
  d.validate();
  return d;
}

bool Domain::physical_boundary() const {
  switch (kind) {
    case DomainKind::Interval:
    case DomainKind::Torus1:
    case DomainKind::Torus2:
    case DomainKind::Square:
    case DomainKind::Box2:
      return true;
    default:
      return false;
  }
}

double Domain::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= length(a);
  return v;
}

double Domain::diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += sqr(length(a));
  return std::sqrt(s);
}

void Domain::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("domain dim must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (!(hi[a] > lo[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a]))
      throw std::invalid_argument("domain bounds must be finite with hi > lo");
  }
}

int Grid::wrap(int axis, int i_axis) const {
  const int na = n[axis];
  if (domain.periodic[axis]) {
    int r = i_axis % na;
    return r < 0 ? r + na : r;
  }
  if (i_axis < 0 || i_axis >= na)
    throw std::out_of_range("index outside non-periodic axis");
  return i_axis;
}

ArrayXd Grid::centers(int axis) const {
  ArrayXd c(n[axis]);
  for (int i = 0; i < n[axis]; ++i) c[i] = center(axis, i);
  return c;
}

ArrayXd Grid::cell_coord(int axis) const {
  ArrayXd c(size);
  for (int i = 0; i < size; ++i)
    c[i] = center(axis, axis == 0 ? ix(i) : iy(i));
  return c;
}

bool Grid::same_layout(const Grid& other) const {
  return domain.kind == other.domain.kind && n == other.n &&
         domain.lo == other.domain.lo && domain.hi == other.domain.hi;
}

Grid build_grid(const Domain& domain, std::array<int, 2> n_cells) {
  domain.validate();
  Grid g;
  g.domain = domain;
  g.n = n_cells;
  if (domain.dim == 1) g.n[1] = 1;
  for (int a = 0; a < domain.dim; ++a) {
    if (g.n[a] < 4) throw std::invalid_argument("grid needs at least 4 cells per axis");
    g.h[a] = domain.length(a) / g.n[a];
  }
  if (domain.dim == 1) g.h[1] = 1.0;
  g.size = g.n[0] * g.n[1];
  g.cell_volume = g.h[0] * (domain.dim == 2 ? g.h[1] : 1.0);
  return g;
}

int BoundaryClassification::count(CellClass c) const {
  int k = 0;
  for (CellClass t : tag) k += (t == c);
  return k;
}

BoundaryClassification classify_boundary(const Grid& grid) {
  BoundaryClassification bc;
  bc.tag.assign(grid.size, CellClass::Interior);
  bc.normal.assign(grid.size, {0, 0});
  const int dim = grid.dim();
  for (int i = 0; i < grid.size; ++i) {
    int touches = 0;
    std::array<int, 2> nrm{0, 0};
    for (int a = 0; a < dim; ++a) {
      if (grid.domain.periodic[a]) continue;
      const int ia = (a == 0) ? grid.ix(i) : grid.iy(i);
      if (ia == 0) {
        ++touches;
        nrm[a] = -1;
      } else if (ia == grid.n[a] - 1) {
        ++touches;
        nrm[a] = +1;
      }
    }
    if (touches == 0) continue;
    if (dim == 1 || touches == 2) {
      bc.tag[i] = CellClass::Corner;
    } else {
      bc.tag[i] = CellClass::Face;
      bc.normal[i] = nrm;
    }
  }
  return bc;
}

}  // namespace jkolab

#include "jkolab/density.hpp"

#include <cmath>
#include <stdexcept>

namespace jkolab {

GridDensity::GridDensity(Grid g, ArrayXd v, double mass_tol)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size)
    throw std::invalid_argument("density size does not match grid");
  if ((values < 0.0).any())
    throw std::invalid_argument("density has negative entries");
  const double m = mass();
  if (std::abs(m - 1.0) > mass_tol)
    throw std::invalid_argument("density mass " + std::to_string(m) +
                                " deviates from 1 beyond tolerance");
}

GridDensity GridDensity::normalized(Grid g, ArrayXd v) {
  if (v.size() != g.size)
    throw std::invalid_argument("density size does not match grid");
  const double m = v.sum() * g.cell_volume;
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::invalid_argument("cannot normalize density with nonpositive mass");
  GridDensity d;
  d.grid = std::move(g);
  d.values = v / m;
  if ((d.values < 0.0).any())
    throw std::invalid_argument("density has negative entries");
  return d;
}

GridDensity GridDensity::unchecked(Grid g, ArrayXd v) {
  GridDensity d;
  d.grid = std::move(g);
  d.values = std::move(v);
  return d;
}

double GridDensity::second_moment() const {
  double s = 0.0;
  for (int i = 0; i < grid.size; ++i) {
    const Vector2d x = grid.center2(i);
    double r2 = sqr(x[0]);
    if (grid.dim() == 2) r2 += sqr(x[1]);
    s += r2 * values[i];
  }
  return s * grid.cell_volume;
}

double GridDensity::mean(int axis) const {
  const ArrayXd c = grid.cell_coord(axis);
  return (c * values).sum() * grid.cell_volume;
}

double GridDensity::stddev(int axis) const {
  const ArrayXd c = grid.cell_coord(axis);
  const double mu = mean(axis);
  const double var = ((c - mu).square() * values).sum() * grid.cell_volume;
  return std::sqrt(std::max(var, 0.0));
}

}  // namespace jkolab

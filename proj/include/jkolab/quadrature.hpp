#pragma once

#include <functional>

#include "jkolab/types.hpp"

namespace jkolab {

// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GaussRule {
  ArrayXd nodes;
  ArrayXd weights;
};
const GaussRule& gauss_legendre(int order);

// Fixed-order Gauss-Legendre on [a, b].
double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       int order = 32);

// Composite Gauss-Legendre with uniform panels; enough for smooth integrands
// when a single panel's order saturates.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order = 16);

}  // namespace jkolab

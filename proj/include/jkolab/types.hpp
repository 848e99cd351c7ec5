#pragma once

#include <Eigen/Dense>
#include <numbers>

namespace jkolab {

using Eigen::ArrayXd;
using Eigen::ArrayXi;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

template <class T>
constexpr T sqr(T x) {
  return x * x;
}

}  // namespace jkolab

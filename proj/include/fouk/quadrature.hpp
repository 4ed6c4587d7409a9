#pragma once

#include <Eigen/Dense>

namespace fouk {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule on [0, 1]. Results are cached per order.
const QuadratureRule& gauss_legendre_01(int order);

/// Gauss-Hermite rule for the weight e^{-x^2} on R. Cached per order.
const QuadratureRule& gauss_hermite(int order);

}  // namespace fouk

#pragma once

#include <Eigen/Dense>

namespace isoq {

/// Gauss-Legendre rule on [-1, 1], nodes in descending order.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Cached per order; thread-safe.
const GaussRule& gauss_legendre(int order);

}  // namespace isoq

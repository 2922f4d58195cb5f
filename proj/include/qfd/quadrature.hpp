#pragma once

#include <vector>

#include "qfd/common.hpp"

namespace qfd {

/// One-dimensional Gauss-Hermite rule for the weight exp(-x^2).
/// `scaled_weights[i]` holds w_i * exp(x_i^2), so that
///   int f(x) dx  ~=  sum_i scaled_weights[i] * f(nodes[i])
/// for f that decays like a Gaussian.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> scaled_weights;
};

/// Nodes in ascending order. Throws std::invalid_argument unless 1 <= order <= 256.
GaussHermiteRule gauss_hermite(int order);

/// Tensor Gauss-Hermite grid in momentum space, centered at `center` and
/// scaled so that exp(-|p - center|^2 / (2 scale^2)) is integrated exactly
/// against polynomials of degree <= 2*order - 1 in each axis.
struct QuadratureSpec {
  int order = 20;
  Vec2 center{0.0, 0.0};
  double scale = 1.0;

  /// Throws std::invalid_argument unless order is even, 4 <= order <= 128,
  /// and scale > 0.
  void validate() const;
};

struct MomentumNode {
  Vec2 p;
  double weight;
};

/// Flattened tensor grid (order^2 nodes, row-major in (p^1, p^2)).
std::vector<MomentumNode> momentum_grid(const QuadratureSpec& spec);

}  // namespace qfd

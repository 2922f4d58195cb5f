#include "qfd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qfd {

namespace {

// Orthonormal Hermite functions psi_j(x) = p_j(x) exp(-x^2/2). Returns
// (psi_n, psi_{n-1}) at x. Working with functions instead of polynomials
// keeps the outer weights representable after multiplying by exp(x^2).
std::pair<double, double> hermite_functions(int n, double x) {
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  double p1 = pim4 * std::exp(-0.5 * x * x);
  double p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = x * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
  }
  return {p1, p2};
}

}  // namespace

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1 || order > 256) {
    throw std::invalid_argument("gauss_hermite: order must be in 1..256");
  }
  const int n = order;
  const int half = (n + 1) / 2;
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> w_scaled(static_cast<std::size_t>(n));

  // Initial guesses for the largest roots follow the classical asymptotic
  // estimates; subsequent roots extrapolate from the previous two.
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    }
    double deriv = 0.0;
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pn1] = hermite_functions(n, z);
      deriv = std::sqrt(2.0 * n) * pn1;
      const double dz = pn / deriv;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    const auto [pn, pn1] = hermite_functions(n, z);
    (void)pn;
    deriv = std::sqrt(2.0 * n) * pn1;
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = z;
    x[hi] = -z;
    w_scaled[lo] = 2.0 / (deriv * deriv);
    w_scaled[hi] = w_scaled[lo];
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(half - 1)] = 0.0;

  GaussHermiteRule rule;
  rule.nodes.assign(x.rbegin(), x.rend());
  rule.scaled_weights.assign(w_scaled.rbegin(), w_scaled.rend());
  rule.weights.resize(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.weights[i] = rule.scaled_weights[i] * std::exp(-rule.nodes[i] * rule.nodes[i]);
  }
  return rule;
}

void QuadratureSpec::validate() const {
  if (order < 4 || order > 128 || order % 2 != 0) {
    throw std::invalid_argument("quadrature order must be even and in 4..128 (got " +
                                std::to_string(order) + ")");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("quadrature scale must be positive");
  }
  if (!std::isfinite(center[0]) || !std::isfinite(center[1])) {
    throw std::invalid_argument("quadrature center must be finite");
  }
}

std::vector<MomentumNode> momentum_grid(const QuadratureSpec& spec) {
  spec.validate();
  const GaussHermiteRule rule = gauss_hermite(spec.order);
  const double stretch = std::numbers::sqrt2 * spec.scale;
  std::vector<MomentumNode> grid;
  grid.reserve(rule.nodes.size() * rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      grid.push_back({{spec.center[0] + stretch * rule.nodes[i],
                       spec.center[1] + stretch * rule.nodes[j]},
                      stretch * stretch * rule.scaled_weights[i] * rule.scaled_weights[j]});
    }
  }
  return grid;
}

}  // namespace qfd

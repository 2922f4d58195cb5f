#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace qfd {

/// Raised when an input leaves the model's domain of validity
/// (non-positive density, |w_vec| >= w_0, lambda outside [0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed or incomplete scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

/// Densities are treated as vacuum at or below this value.
inline constexpr double kDensityFloor = 1e-12;

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so results are bit-stable for a fixed input.
double pairwise_sum(std::span<const double> values);

/// Physical constants of the model. Nondimensional defaults.
struct PhysParams {
  double hbar = 1.0;
  double v_F = 1.0;
  double m = 1.0;
  double theta = 1.0;

  /// Spin precession rate 2 v_F / hbar.
  double omega() const { return 2.0 * v_F / hbar; }
  double m_theta() const { return m * theta; }

  /// Throws std::invalid_argument naming the first non-positive field.
  void validate() const;
};

}  // namespace qfd

#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "qfd/common.hpp"
#include "qfd/pauli.hpp"

namespace qfd {

using Moments4 = std::array<double, 4>;

/// Two-component spinor sampled on a 1D grid. The derivative arrays are
/// optional; when empty, moments_from_spinor differentiates numerically.
struct SpinorField1D {
  std::vector<double> r;
  std::vector<Complex> psi1, psi2;
  std::vector<Complex> dpsi1, dpsi2;

  bool has_derivatives() const { return !dpsi1.empty(); }
  /// Throws std::invalid_argument on size mismatch or non-increasing grid.
  void validate() const;
};

/// Pointwise densities n_s and currents J_s (1D, single cartesian axis).
struct SpinorMoments {
  std::vector<Moments4> n;
  std::vector<Moments4> J;
};

/// Moments of a pure state. n_s are the Pauli components of the density
/// matrix N_ij = psi_i conj(psi_j); J_s those of the current matrix
/// C_ij = (hbar / 2i) (psi_i' conj(psi_j) - psi_i conj(psi_j')).
/// Throws std::invalid_argument if fewer than 3 points are given without
/// analytic derivatives.
SpinorMoments moments_from_spinor(const SpinorField1D& psi, const PhysParams& params);

/// Residual of the pure-state closure
///   J_s = n_s J_0 / n_0 - (hbar/2) eta_{sij} n_i d/dr (n_j / n_0),  s = 1..3,
/// returned per grid point as (R_1, R_2, R_3). Derivatives use the
/// second-order stencils of finite_difference.hpp.
/// Throws DomainError if n_0 <= 0 anywhere.
std::vector<Vec3> pure_state_identity_residual(std::span<const double> r,
                                               std::span<const Moments4> n,
                                               std::span<const Moments4> J,
                                               const PhysParams& params);

/// Oblique-incidence transmission through a tall barrier,
///   T = cos^2(phi) / (1 - cos^2(q) sin^2(phi)).
/// Throws std::invalid_argument for |phi| >= pi/2 and DomainError for a
/// vanishing denominator.
double transmission(double phi, double q_phase);

/// Normal-incidence scattering state of a massless Dirac electron on the
/// square barrier V0 on (a, b).
class KleinState {
 public:
  /// Throws DomainError if E == 0 or E == V0 and std::invalid_argument
  /// unless a < b.
  KleinState(double energy, double v0, double a, double b, const PhysParams& params);

  double energy() const { return energy_; }
  double barrier_height() const { return v0_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double k() const { return k_; }
  double q() const { return q_; }
  int s() const { return s_; }
  int s_prime() const { return s_prime_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  Complex t() const { return t_; }
  /// |t|^2.
  double transmission_probability() const { return std::norm(t_); }

  /// V0 on the open interval (a, b), zero elsewhere.
  double potential(double x) const;

  std::pair<Complex, Complex> psi(double x) const;
  std::pair<Complex, Complex> dpsi(double x) const;

  /// Samples psi and its analytic derivative on `r`.
  SpinorField1D sample(std::span<const double> r) const;

 private:
  double energy_, v0_, a_, b_;
  double k_, q_;
  int s_, s_prime_;
  double alpha_, beta_;
  Complex t_;
};

KleinState klein_state(double energy, double v0, double a, double b, const PhysParams& params);

/// Closed-form moments of the Klein state at r:
///   n = (1, s, 0, 0),  J_0 = (E - V(r)) n_1 / v_F,  J_1 = (E - V(r)) n_0 / v_F,
///   J_2 = J_3 = 0.
std::pair<Moments4, Moments4> klein_moments(const KleinState& ks, double r,
                                            const PhysParams& params);

}  // namespace qfd

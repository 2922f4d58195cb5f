#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qfd/common.hpp"
#include "qfd/pauli.hpp"
#include "qfd/quadrature.hpp"

namespace qfd {

/// Hydrodynamic moments at one point: n[s] = int w_s dp and
/// J[s][k] = int p^k w_s dp for s = 0..3, k = 0,1 (cartesian axes 1,2).
struct MomentState {
  std::array<double, 4> n{};
  std::array<Vec2, 4> J{};

  /// u_s = J_s / n_s. Throws DomainError when n_s == 0.
  Vec2 velocity(int s) const;
};

/// Lagrange multipliers of the constrained entropy minimizer at one point.
///   q_0(p) = 1 + q0_0 + q0_k . p + |p|^2 / (2 m theta)
///   q_s(p) = qs_0[s-1] + qs_k[s-1] . p,  s = 1..3
struct Multipliers {
  double q0_0 = 0.0;
  Vec2 q0_k{0.0, 0.0};
  Vec3 qs_0{0.0, 0.0, 0.0};
  std::array<Vec2, 3> qs_k{};
};

/// Second moments at equilibrium, L[s-1][i][k] for s = 1..3, i,k = 0,1.
struct ClosureTensor {
  std::array<std::array<Vec2, 2>, 3> L{};

  double operator()(int s, int i, int k) const {
    return L[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(i)]
            [static_cast<std::size_t>(k)];
  }
};

/// Quadrature moments of a Wigner matrix: n, J and the second moments
/// Q2[s][i][k] = int p^i p^k w_s dp.
struct MomentTable {
  std::array<double, 4> n{};
  std::array<Vec2, 4> J{};
  std::array<std::array<Vec2, 2>, 4> Q2{};
};

// ---------------------------------------------------------------------------
// Entropy

/// c(lambda) = 1/2 log(1 - lambda^2) + lambda/2 log((1+lambda)/(1-lambda)).
/// Near lambda = 1 the equivalent form
/// (1+lambda)/2 log(1+lambda) + (1-lambda)/2 log(1-lambda) is used.
/// Throws DomainError outside [0, 1).
double c_of_lambda(double lambda);

/// dc/dlambda = atanh(lambda).
double c_prime(double lambda);

/// Samples the Wigner matrix at spatial index `x` and momentum `p`.
using PhaseSpaceSampler = std::function<PauliComponents(std::size_t x, const Vec2& p)>;

/// Semiclassical free-energy functional
///   S~(w) = int [ w_0 (log w_0 + c(|w_vec|/w_0) + |p|^2/(2 m theta))
///                 + (v_F/theta) p . w_vec ] dx dp
/// with the x-integral given by `spatial_weights` (one weight per spatial
/// sample) and the p-integral by the tensor rule `quad`.
/// Throws DomainError naming the sample if w_0 <= 0 or |w_vec| >= w_0.
double entropy_semiclassical(const PhaseSpaceSampler& w, std::span<const double> spatial_weights,
                             const PhysParams& params, const QuadratureSpec& quad);

// ---------------------------------------------------------------------------
// Equilibrium states

/// Full minimizer: w_0 = cosh(Q) e^{-q_0}, w_s = q_s sinh(Q)/Q e^{-q_0}.
PauliComponents equilibrium_from_multipliers(const Multipliers& q, const PhysParams& params,
                                             const Vec2& p);

/// First-order expansion in the spin multipliers: w_0 = e^{-q_0},
/// w_s = q_s e^{-q_0}.
PauliComponents equilibrium_linearized(const Multipliers& q, const PhysParams& params,
                                       const Vec2& p);

/// Strongly-mixed local equilibrium. With u_0 = J_0/n_0 and
/// G(p) = exp(-|p-u_0|^2/(2 m theta)) / (2 pi m theta):
///   w_0 = n_0 G,  w_s = [n_s + (J_s - n_s u_0).(p - u_0)/(m theta)] G.
/// Throws DomainError if n_0 <= 0.
PauliComponents equilibrium_strongly_mixed(const MomentState& state, const PhysParams& params,
                                           const Vec2& p);

/// Gauss-Hermite rule adapted to the Maxwellian factor of `state`
/// (center u_0, scale sqrt(m theta)).
QuadratureSpec quadrature_for(const MomentState& state, const PhysParams& params,
                              int order = 20);

/// Moments of `w` on the tensor grid of `quad`. Each entry is reduced by
/// pairwise summation over the nodes in grid order.
MomentTable moments_via_quadrature(const std::function<PauliComponents(const Vec2&)>& w,
                                   const QuadratureSpec& quad);

/// L_s^{ik} = n_s (m theta delta_ik - J_0^i J_0^k / n_0^2)
///            + (J_0^i J_s^k + J_s^i J_0^k) / n_0.
/// Throws DomainError if n_0 <= 0.
ClosureTensor closure_tensor(const MomentState& state, const PhysParams& params);

// ---------------------------------------------------------------------------
// Strongly-mixed diagnostic

struct MixednessReport {
  double ratio = 0.0;    ///< |n_vec|^2 / n_0^2
  double kinetic = 0.0;  ///< K = sum_j |u_j - u_0|^2 / (2m)
  double bound = 1.0;    ///< 1 / (1 + 2K / (3 theta))
  double margin = 1.0;   ///< bound - ratio

  /// "ratio << bound", read as ratio <= factor * bound.
  bool strongly_mixed(double factor = kDefaultFactor) const { return ratio <= factor * bound; }
  /// The necessary condition |n_vec|^2/n_0^2 << 1, read the same way.
  bool necessary_condition_holds(double factor = kDefaultFactor) const {
    return ratio <= factor;
  }

  static constexpr double kDefaultFactor = 0.1;
};

/// Components with n_j = 0 and J_j = 0 contribute nothing to K.
/// Throws DomainError if n_0 <= 0 or if n_j = 0 while J_j != 0.
MixednessReport mixedness_check(const MomentState& state, const PhysParams& params);

}  // namespace qfd

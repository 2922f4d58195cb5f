#include "qfd/purestate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qfd/finite_difference.hpp"

namespace qfd {

void SpinorField1D::validate() const {
  const std::size_t n = r.size();
  if (psi1.size() != n || psi2.size() != n) {
    throw std::invalid_argument("SpinorField1D: psi arrays must match the grid size");
  }
  if (!dpsi1.empty() || !dpsi2.empty()) {
    if (dpsi1.size() != n || dpsi2.size() != n) {
      throw std::invalid_argument("SpinorField1D: derivative arrays must match the grid size");
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(r[i] > r[i - 1])) throw std::invalid_argument("SpinorField1D: grid must be strictly increasing");
  }
}

SpinorMoments moments_from_spinor(const SpinorField1D& psi, const PhysParams& params) {
  psi.validate();
  const std::size_t n = psi.r.size();
  std::vector<Complex> d1, d2;
  if (psi.has_derivatives()) {
    d1 = psi.dpsi1;
    d2 = psi.dpsi2;
  } else {
    if (n < 3) {
      throw std::invalid_argument(
          "moments_from_spinor: at least 3 grid points are required without analytic derivatives");
    }
    d1 = derivative<Complex>(psi.r, psi.psi1);
    d2 = derivative<Complex>(psi.r, psi.psi2);
  }

  const Complex factor = params.hbar / Complex(0.0, 2.0);
  SpinorMoments out;
  out.n.resize(n);
  out.J.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::array<Complex, 2> v{psi.psi1[i], psi.psi2[i]};
    const std::array<Complex, 2> dv{d1[i], d2[i]};
    ComplexMatrix2 density{v[0] * std::conj(v[0]), v[0] * std::conj(v[1]),
                           v[1] * std::conj(v[0]), v[1] * std::conj(v[1])};
    auto current_entry = [&](std::size_t a, std::size_t b) {
      return factor * (dv[a] * std::conj(v[b]) - v[a] * std::conj(dv[b]));
    };
    ComplexMatrix2 current{current_entry(0, 0), current_entry(0, 1), current_entry(1, 0),
                           current_entry(1, 1)};
    out.n[i] = decompose(density).c;
    out.J[i] = decompose(current).c;
  }
  return out;
}

std::vector<Vec3> pure_state_identity_residual(std::span<const double> r,
                                               std::span<const Moments4> n,
                                               std::span<const Moments4> J,
                                               const PhysParams& params) {
  const std::size_t size = r.size();
  if (n.size() != size || J.size() != size) {
    throw std::invalid_argument("pure_state_identity_residual: size mismatch");
  }
  for (std::size_t i = 0; i < size; ++i) {
    if (!(n[i][0] > 0.0)) {
      std::ostringstream msg;
      msg << "pure_state_identity_residual: n_0 <= 0 at r = " << r[i];
      throw DomainError(msg.str());
    }
  }
  // Spin direction n_j / n_0 and its derivative.
  std::array<std::vector<double>, 3> direction;
  std::array<std::vector<double>, 3> slope;
  for (std::size_t j = 0; j < 3; ++j) {
    direction[j].resize(size);
    for (std::size_t i = 0; i < size; ++i) direction[j][i] = n[i][j + 1] / n[i][0];
    slope[j] = derivative<double>(r, direction[j]);
  }
  std::vector<Vec3> residual(size);
  for (std::size_t i = 0; i < size; ++i) {
    const Vec3 nvec{n[i][1], n[i][2], n[i][3]};
    const Vec3 grad{slope[0][i], slope[1][i], slope[2][i]};
    const Vec3 twist = cross(nvec, grad);
    for (std::size_t s = 0; s < 3; ++s) {
      const double predicted = nvec[s] * J[i][0] / n[i][0] - 0.5 * params.hbar * twist[s];
      residual[i][s] = J[i][s + 1] - predicted;
    }
  }
  return residual;
}

double transmission(double phi, double q_phase) {
  if (!(std::abs(phi) < 0.5 * std::numbers::pi)) {
    throw std::invalid_argument("transmission: incidence angle must lie in (-pi/2, pi/2)");
  }
  const double c = std::cos(phi);
  const double sn = std::sin(phi);
  const double cq = std::cos(q_phase);
  const double denominator = 1.0 - cq * cq * sn * sn;
  if (!(denominator > 0.0)) {
    throw DomainError("transmission: vanishing denominator 1 - cos^2(q) sin^2(phi)");
  }
  return c * c / denominator;
}

KleinState::KleinState(double energy, double v0, double a, double b, const PhysParams& params)
    : energy_(energy), v0_(v0), a_(a), b_(b) {
  params.validate();
  if (energy == 0.0) throw DomainError("klein_state: E = 0 leaves sign(E) undefined");
  if (energy == v0) throw DomainError("klein_state: E = V0 leaves sign(E - V0) undefined");
  if (!(a < b)) throw std::invalid_argument("klein_state: barrier edges must satisfy a < b");
  const double hv = params.hbar * params.v_F;
  k_ = std::abs(energy) / hv;
  q_ = std::abs(energy - v0) / hv;
  s_ = energy > 0.0 ? 1 : -1;
  s_prime_ = (energy - v0) > 0.0 ? 1 : -1;
  const double ratio = static_cast<double>(s_prime_) / s_;
  alpha_ = 0.5 * (1.0 + ratio);
  beta_ = 0.5 * (1.0 - ratio);
  // The phase length is taken to be the barrier width.
  const double width = b - a;
  const double phase = width * (static_cast<double>(s_) / s_prime_ * q_ - k_);
  t_ = std::polar(1.0, phase);
}

double KleinState::potential(double x) const { return (x > a_ && x < b_) ? v0_ : 0.0; }

std::pair<Complex, Complex> KleinState::psi(double x) const {
  using namespace std::complex_literals;
  if (x <= a_) {
    const Complex e = std::exp(1i * (k_ * x));
    return {e, static_cast<double>(s_) * e};
  }
  if (x >= b_) {
    const Complex e = t_ * std::exp(1i * (k_ * x));
    return {e, static_cast<double>(s_) * e};
  }
  const Complex fwd = alpha_ * std::exp(1i * (q_ * x));
  const Complex bwd = beta_ * std::exp(-1i * (q_ * x));
  return {fwd + bwd, static_cast<double>(s_prime_) * (fwd - bwd)};
}

std::pair<Complex, Complex> KleinState::dpsi(double x) const {
  using namespace std::complex_literals;
  if (x <= a_ || x >= b_) {
    const auto [p1, p2] = psi(x);
    return {1i * k_ * p1, 1i * k_ * p2};
  }
  const Complex fwd = 1i * q_ * alpha_ * std::exp(1i * (q_ * x));
  const Complex bwd = -1i * q_ * beta_ * std::exp(-1i * (q_ * x));
  return {fwd + bwd, static_cast<double>(s_prime_) * (fwd - bwd)};
}

SpinorField1D KleinState::sample(std::span<const double> r) const {
  SpinorField1D out;
  out.r.assign(r.begin(), r.end());
  for (double x : r) {
    const auto [p1, p2] = psi(x);
    const auto [d1, d2] = dpsi(x);
    out.psi1.push_back(p1);
    out.psi2.push_back(p2);
    out.dpsi1.push_back(d1);
    out.dpsi2.push_back(d2);
  }
  return out;
}

KleinState klein_state(double energy, double v0, double a, double b, const PhysParams& params) {
  return KleinState(energy, v0, a, b, params);
}

std::pair<Moments4, Moments4> klein_moments(const KleinState& ks, double r,
                                            const PhysParams& params) {
  const Moments4 n{1.0, static_cast<double>(ks.s()), 0.0, 0.0};
  const double kinetic = ks.energy() - ks.potential(r);
  const Moments4 J{kinetic * n[1] / params.v_F, kinetic * n[0] / params.v_F, 0.0, 0.0};
  return {n, J};
}

}  // namespace qfd

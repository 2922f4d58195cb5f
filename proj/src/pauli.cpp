#include "qfd/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qfd {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void PhysParams::validate() const {
  auto require = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + ": must be a positive finite number");
    }
  };
  require(hbar, "hbar");
  require(v_F, "vF");
  require(m, "m");
  require(theta, "theta");
}

ComplexMatrix2 ComplexMatrix2::operator*(const ComplexMatrix2& o) const {
  return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
          m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
}

ComplexMatrix2 ComplexMatrix2::operator+(const ComplexMatrix2& o) const {
  return {m11 + o.m11, m12 + o.m12, m21 + o.m21, m22 + o.m22};
}

ComplexMatrix2 ComplexMatrix2::operator*(Complex a) const {
  return {m11 * a, m12 * a, m21 * a, m22 * a};
}

double ComplexMatrix2::max_abs() const {
  return std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
}

double ComplexMatrix2::hermiticity_defect() const {
  return std::max({std::abs(m11.imag()), std::abs(m22.imag()),
                   std::abs(m21 - std::conj(m12))});
}

double PauliComponents::vector_norm() const {
  return std::sqrt(c[1] * c[1] + c[2] * c[2] + c[3] * c[3]);
}

const ComplexMatrix2& pauli_matrix(int s) {
  using namespace std::complex_literals;
  static const std::array<ComplexMatrix2, 4> sigma = {
      ComplexMatrix2{1.0, 0.0, 0.0, 1.0},
      ComplexMatrix2{0.0, 1.0, 1.0, 0.0},
      ComplexMatrix2{0.0, -1i, 1i, 0.0},
      ComplexMatrix2{1.0, 0.0, 0.0, -1.0},
  };
  if (s < 0 || s > 3) throw std::out_of_range("pauli_matrix: index must be in 0..3");
  return sigma[static_cast<std::size_t>(s)];
}

PauliComponents decompose(const ComplexMatrix2& M) {
  const double scale = M.max_abs();
  const double defect = M.hermiticity_defect();
  if (defect > kHermitianTolerance * scale) {
    std::ostringstream msg;
    msg << "decompose: matrix is not Hermitian (defect " << defect << ", relative "
        << (scale > 0.0 ? defect / scale : defect) << ")";
    throw std::invalid_argument(msg.str());
  }
  // tr(sigma_s M)/2 written out; imaginary parts vanish for Hermitian M.
  PauliComponents out;
  out[0] = 0.5 * (M.m11 + M.m22).real();
  out[1] = 0.5 * (M.m12 + M.m21).real();
  out[2] = 0.5 * (M.m21 - M.m12).imag();
  out[3] = 0.5 * (M.m11 - M.m22).real();
  return out;
}

ComplexMatrix2 compose(const PauliComponents& c) {
  return {Complex(c[0] + c[3], 0.0), Complex(c[1], -c[2]), Complex(c[1], c[2]),
          Complex(c[0] - c[3], 0.0)};
}

int levi_civita(int s, int k, int j) {
  if (s < 1 || s > 3 || k < 1 || k > 3 || j < 1 || j > 3) {
    throw std::out_of_range("levi_civita: indices must be in 1..3");
  }
  // (s-k)(k-j)(j-s)/2 is +1 on cyclic, -1 on anticyclic, 0 otherwise.
  return (s - k) * (k - j) * (j - s) / 2;
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  Vec3 out{};
  for (int s = 1; s <= 3; ++s) {
    double acc = 0.0;
    for (int k = 1; k <= 3; ++k) {
      for (int j = 1; j <= 3; ++j) {
        acc += levi_civita(s, k, j) * a[k - 1] * b[j - 1];
      }
    }
    out[s - 1] = acc;
  }
  return out;
}

}  // namespace qfd

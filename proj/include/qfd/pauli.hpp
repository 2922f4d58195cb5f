#pragma once

#include <array>
#include <complex>

#include "qfd/common.hpp"

namespace qfd {

using Complex = std::complex<double>;

/// Complex 2x2 matrix, row-major: {m11, m12, m21, m22}.
struct ComplexMatrix2 {
  Complex m11{}, m12{}, m21{}, m22{};

  ComplexMatrix2 operator*(const ComplexMatrix2& o) const;
  ComplexMatrix2 operator+(const ComplexMatrix2& o) const;
  ComplexMatrix2 operator*(Complex a) const;
  Complex trace() const { return m11 + m22; }
  double max_abs() const;

  /// Largest deviation from Hermiticity: imaginary diagonal parts and
  /// |m21 - conj(m12)|.
  double hermiticity_defect() const;

  static ComplexMatrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

/// Real coefficients of a Hermitian 2x2 matrix in the basis
/// {sigma_0, sigma_1, sigma_2, sigma_3}. Index 0 is the scalar part,
/// 1..3 the "spinorial" vector part.
struct PauliComponents {
  std::array<double, 4> c{};

  double& operator[](std::size_t s) { return c[s]; }
  double operator[](std::size_t s) const { return c[s]; }

  Vec3 vector_part() const { return {c[1], c[2], c[3]}; }
  double vector_norm() const;
};

/// Relative tolerance on the Hermiticity defect accepted by decompose().
inline constexpr double kHermitianTolerance = 1e-12;

/// sigma_0 .. sigma_3.
const ComplexMatrix2& pauli_matrix(int s);

/// c_s = tr(sigma_s M) / 2. Throws std::invalid_argument if M is not
/// Hermitian to kHermitianTolerance relative to its largest entry.
PauliComponents decompose(const ComplexMatrix2& M);

/// c_0 sigma_0 + c_1 sigma_1 + c_2 sigma_2 + c_3 sigma_3.
ComplexMatrix2 compose(const PauliComponents& c);

/// Totally antisymmetric symbol on {1,2,3} with eta_123 = +1.
/// Throws std::out_of_range for indices outside 1..3.
int levi_civita(int s, int k, int j);

/// (a x b)_s evaluated as eta_{skj} a_k b_j.
Vec3 cross(const Vec3& a, const Vec3& b);

}  // namespace qfd

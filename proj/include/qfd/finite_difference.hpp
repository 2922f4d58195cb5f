#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace qfd {

/// Second-order derivative on a strictly increasing, possibly non-uniform
/// grid: three-point central stencil inside, three-point one-sided stencils
/// at both ends. Requires at least 3 points.
template <typename T>
std::vector<T> derivative(std::span<const double> r, std::span<const T> f) {
  const std::size_t n = r.size();
  if (n < 3 || f.size() != n) {
    throw std::invalid_argument("derivative: need >= 3 points and matching sizes");
  }
  std::vector<T> out(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = r[i] - r[i - 1];
    const double h2 = r[i + 1] - r[i];
    out[i] = f[i - 1] * (-h2 / (h1 * (h1 + h2))) + f[i] * ((h2 - h1) / (h1 * h2)) +
             f[i + 1] * (h1 / (h2 * (h1 + h2)));
  }
  {
    const double h1 = r[1] - r[0];
    const double h2 = r[2] - r[1];
    out[0] = f[0] * (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) + f[1] * ((h1 + h2) / (h1 * h2)) +
             f[2] * (-h1 / (h2 * (h1 + h2)));
  }
  {
    const double h1 = r[n - 1] - r[n - 2];
    const double h2 = r[n - 2] - r[n - 3];
    out[n - 1] = f[n - 1] * ((2.0 * h1 + h2) / (h1 * (h1 + h2))) +
                 f[n - 2] * (-(h1 + h2) / (h1 * h2)) + f[n - 3] * (h1 / (h2 * (h1 + h2)));
  }
  return out;
}

}  // namespace qfd

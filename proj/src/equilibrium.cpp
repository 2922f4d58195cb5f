#include "qfd/equilibrium.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace qfd {

namespace {

void require_positive_density(double n0, const char* where) {
  if (!(n0 > 0.0)) {
    std::ostringstream msg;
    msg << where << ": n_0 must be positive (got " << n0 << ")";
    throw DomainError(msg.str());
  }
}

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// sinh(Q)/Q with the removable singularity at 0 handled by its series.
double sinhc(double Q) {
  if (std::abs(Q) < 1e-4) return 1.0 + Q * Q / 6.0;
  return std::sinh(Q) / Q;
}

double q0_of(const Multipliers& q, const PhysParams& params, const Vec2& p) {
  return 1.0 + q.q0_0 + dot(q.q0_k, p) + dot(p, p) / (2.0 * params.m_theta());
}

Vec3 qs_of(const Multipliers& q, const Vec2& p) {
  Vec3 out{};
  for (std::size_t s = 0; s < 3; ++s) out[s] = q.qs_0[s] + dot(q.qs_k[s], p);
  return out;
}

}  // namespace

Vec2 MomentState::velocity(int s) const {
  const auto idx = static_cast<std::size_t>(s);
  if (n[idx] == 0.0) {
    throw DomainError("velocity u_" + std::to_string(s) + " undefined: n_" + std::to_string(s) +
                      " = 0");
  }
  return {J[idx][0] / n[idx], J[idx][1] / n[idx]};
}

double c_of_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    std::ostringstream msg;
    msg << "c_of_lambda: lambda must lie in [0, 1) (got " << lambda << ")";
    throw DomainError(msg.str());
  }
  if (lambda > 1.0 - 1e-8) {
    return 0.5 * (1.0 + lambda) * std::log1p(lambda) + 0.5 * (1.0 - lambda) * std::log1p(-lambda);
  }
  return 0.5 * std::log1p(-lambda * lambda) +
         0.5 * lambda * (std::log1p(lambda) - std::log1p(-lambda));
}

double c_prime(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw DomainError("c_prime: lambda must lie in [0, 1)");
  }
  return std::atanh(lambda);
}

double entropy_semiclassical(const PhaseSpaceSampler& w, std::span<const double> spatial_weights,
                             const PhysParams& params, const QuadratureSpec& quad) {
  params.validate();
  const auto grid = momentum_grid(quad);
  const double inv_2mt = 1.0 / (2.0 * params.m_theta());
  const double vf_over_theta = params.v_F / params.theta;

  std::vector<double> per_x(spatial_weights.size());
  std::vector<double> terms(grid.size());
  for (std::size_t x = 0; x < spatial_weights.size(); ++x) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec2& p = grid[i].p;
      const PauliComponents c = w(x, p);
      const double w0 = c[0];
      const double wv = c.vector_norm();
      if (!(w0 > 0.0) || !(wv < w0)) {
        std::ostringstream msg;
        msg << "entropy_semiclassical: |w_vec| < w_0 violated at spatial sample " << x
            << ", p = (" << p[0] << ", " << p[1] << "): w_0 = " << w0 << ", |w_vec| = " << wv;
        throw DomainError(msg.str());
      }
      const double density_part =
          w0 * (std::log(w0) + c_of_lambda(wv / w0) + dot(p, p) * inv_2mt);
      const double spin_part = vf_over_theta * (p[0] * c[1] + p[1] * c[2]);
      terms[i] = grid[i].weight * (density_part + spin_part);
    }
    per_x[x] = spatial_weights[x] * pairwise_sum(terms);
  }
  return pairwise_sum(per_x);
}

PauliComponents equilibrium_from_multipliers(const Multipliers& q, const PhysParams& params,
                                             const Vec2& p) {
  const double decay = std::exp(-q0_of(q, params, p));
  const Vec3 qs = qs_of(q, p);
  const double Q = std::sqrt(qs[0] * qs[0] + qs[1] * qs[1] + qs[2] * qs[2]);
  const double ratio = sinhc(Q) * decay;
  return PauliComponents{{std::cosh(Q) * decay, qs[0] * ratio, qs[1] * ratio, qs[2] * ratio}};
}

PauliComponents equilibrium_linearized(const Multipliers& q, const PhysParams& params,
                                       const Vec2& p) {
  const double decay = std::exp(-q0_of(q, params, p));
  const Vec3 qs = qs_of(q, p);
  return PauliComponents{{decay, qs[0] * decay, qs[1] * decay, qs[2] * decay}};
}

PauliComponents equilibrium_strongly_mixed(const MomentState& state, const PhysParams& params,
                                           const Vec2& p) {
  require_positive_density(state.n[0], "equilibrium_strongly_mixed");
  const double mt = params.m_theta();
  const Vec2 u0 = state.velocity(0);
  const Vec2 dp{p[0] - u0[0], p[1] - u0[1]};
  const double G = std::exp(-dot(dp, dp) / (2.0 * mt)) / (2.0 * std::numbers::pi * mt);

  PauliComponents out;
  out[0] = state.n[0] * G;
  for (std::size_t s = 1; s < 4; ++s) {
    const Vec2 excess{state.J[s][0] - state.n[s] * u0[0], state.J[s][1] - state.n[s] * u0[1]};
    out[s] = (state.n[s] + dot(excess, dp) / mt) * G;
  }
  return out;
}

QuadratureSpec quadrature_for(const MomentState& state, const PhysParams& params, int order) {
  require_positive_density(state.n[0], "quadrature_for");
  return QuadratureSpec{order, state.velocity(0), std::sqrt(params.m_theta())};
}

MomentTable moments_via_quadrature(const std::function<PauliComponents(const Vec2&)>& w,
                                   const QuadratureSpec& quad) {
  const auto grid = momentum_grid(quad);
  // Rows: 4 densities, 8 currents, 16 second moments.
  constexpr std::size_t kRows = 4 + 8 + 16;
  std::vector<std::vector<double>> rows(kRows, std::vector<double>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Vec2& p = grid[g].p;
    const PauliComponents c = w(p);
    for (std::size_t s = 0; s < 4; ++s) {
      const double ws = grid[g].weight * c[s];
      rows[s][g] = ws;
      for (std::size_t i = 0; i < 2; ++i) {
        rows[4 + 2 * s + i][g] = p[i] * ws;
        for (std::size_t k = 0; k < 2; ++k) rows[12 + 4 * s + 2 * i + k][g] = p[i] * p[k] * ws;
      }
    }
  }
  MomentTable out;
  for (std::size_t s = 0; s < 4; ++s) {
    out.n[s] = pairwise_sum(rows[s]);
    for (std::size_t i = 0; i < 2; ++i) {
      out.J[s][i] = pairwise_sum(rows[4 + 2 * s + i]);
      for (std::size_t k = 0; k < 2; ++k) out.Q2[s][i][k] = pairwise_sum(rows[12 + 4 * s + 2 * i + k]);
    }
  }
  return out;
}

ClosureTensor closure_tensor(const MomentState& state, const PhysParams& params) {
  require_positive_density(state.n[0], "closure_tensor");
  const double n0 = state.n[0];
  const double mt = params.m_theta();
  const Vec2& J0 = state.J[0];
  ClosureTensor out;
  for (std::size_t s = 1; s < 4; ++s) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        const double delta = (i == k) ? 1.0 : 0.0;
        out.L[s - 1][i][k] = state.n[s] * (mt * delta - J0[i] * J0[k] / (n0 * n0)) +
                             (J0[i] * state.J[s][k] + state.J[s][i] * J0[k]) / n0;
      }
    }
  }
  return out;
}

MixednessReport mixedness_check(const MomentState& state, const PhysParams& params) {
  require_positive_density(state.n[0], "mixedness_check");
  const double n0 = state.n[0];
  const Vec2 u0 = state.velocity(0);
  MixednessReport report;
  double nvec2 = 0.0;
  double kinetic = 0.0;
  for (std::size_t j = 1; j < 4; ++j) {
    nvec2 += state.n[j] * state.n[j];
    if (state.n[j] == 0.0) {
      if (state.J[j][0] != 0.0 || state.J[j][1] != 0.0) {
        throw DomainError("mixedness_check: n_" + std::to_string(j) +
                          " = 0 with nonzero J_" + std::to_string(j) +
                          " (velocity undefined)");
      }
      continue;
    }
    const Vec2 uj = state.velocity(static_cast<int>(j));
    const Vec2 du{uj[0] - u0[0], uj[1] - u0[1]};
    kinetic += dot(du, du) / (2.0 * params.m);
  }
  report.ratio = nvec2 / (n0 * n0);
  report.kinetic = kinetic;
  report.bound = 1.0 / (1.0 + 2.0 * kinetic / (3.0 * params.theta));
  report.margin = report.bound - report.ratio;
  return report;
}

}  // namespace qfd

#include "qfd/qfde1d.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace qfd {

namespace {

using Complex = std::complex<double>;

const Cell1D& neighbor(const Field1D& f, int i) {
  const int n = static_cast<int>(f.cells.size());
  if (i >= 0 && i < n) return f.cells[static_cast<std::size_t>(i)];
  if (f.bc == BoundaryCondition::periodic) {
    return f.cells[static_cast<std::size_t>((i % n + n) % n)];
  }
  return f.cells[static_cast<std::size_t>(std::clamp(i, 0, n - 1))];
}

// Coefficients of the spin block in the closure: with u_0 = J_0/n_0,
// L^{11}_s = n_s (m theta - u_0^2) + 2 u_0 J_s.
struct SpinCoefficients {
  double a;
  double b;
};

SpinCoefficients spin_coefficients(double n0, double J0, const PhysParams& params) {
  const double u0 = J0 / n0;
  return {params.m_theta() - u0 * u0, 2.0 * u0};
}

// d/dt (z, Z) = M (z, Z) with z = n_2 + i n_3 and Z = J_2 + i J_3:
//   M = [[0, i w], [i w a - V', i w b]].
struct Matrix2c {
  Complex m11, m12, m21, m22;
};

Matrix2c spin_matrix(const SpinCoefficients& c, double dV, double omega) {
  const Complex i(0.0, 1.0);
  return {0.0, i * omega, i * omega * c.a - dV, i * omega * c.b};
}

double spin_rate(const Matrix2c& M) {
  const Complex mu = 0.5 * (M.m11 + M.m22);
  const Complex det = M.m11 * M.m22 - M.m12 * M.m21;
  const Complex delta = std::sqrt(mu * mu - det);
  return std::max(std::abs(mu + delta), std::abs(mu - delta));
}

// exp(M tau) for a 2x2 complex matrix:
//   e^{mu tau} [cosh(delta tau) I + sinh(delta tau)/delta (M - mu I)],
// mu = tr M / 2, delta^2 = mu^2 - det M. Both cosh and sinh(x)/delta are
// even in delta, so the square-root branch is irrelevant.
Matrix2c expm(const Matrix2c& M, double tau) {
  const Complex mu = 0.5 * (M.m11 + M.m22);
  const Complex det = M.m11 * M.m22 - M.m12 * M.m21;
  const Complex delta = std::sqrt(mu * mu - det);
  const Complex x = delta * tau;
  const Complex ch = std::cosh(x);
  const Complex sh_over = std::abs(x) < 1e-5 ? tau * (1.0 + x * x / 6.0) : std::sinh(x) / delta;
  const Complex scale = std::exp(mu * tau);
  return {scale * (ch + sh_over * (M.m11 - mu)), scale * sh_over * M.m12,
          scale * sh_over * M.m21, scale * (ch + sh_over * (M.m22 - mu))};
}

struct LocalState {
  double J0, J1, n2, n3, J2, J3;
};

LocalState local_rhs(const LocalState& y, double n0, double n1, double dV,
                     const PhysParams& params) {
  const double w = params.omega();
  const auto c = spin_coefficients(n0, y.J0, params);
  return {-n0 * dV,
          -n1 * dV,
          -w * y.J3,
          w * y.J2,
          -w * (c.a * y.n3 + c.b * y.J3) - y.n2 * dV,
          w * (c.a * y.n2 + c.b * y.J2) - y.n3 * dV};
}

LocalState axpy(const LocalState& y, double h, const LocalState& k) {
  return {y.J0 + h * k.J0, y.J1 + h * k.J1, y.n2 + h * k.n2,
          y.n3 + h * k.n3, y.J2 + h * k.J2, y.J3 + h * k.J3};
}

// Cell-local sources (spin rotation and potential force) over a time tau.
void local_step(Cell1D& cell, double dV, double tau, RotationIntegrator integrator,
                const PhysParams& params) {
  const double n0 = cell.n[0];
  const double n1 = cell.n[1];
  if (integrator == RotationIntegrator::rk4) {
    const LocalState y{cell.J[0], cell.J[1], cell.n[2], cell.n[3], cell.J[2], cell.J[3]};
    const LocalState k1 = local_rhs(y, n0, n1, dV, params);
    const LocalState k2 = local_rhs(axpy(y, 0.5 * tau, k1), n0, n1, dV, params);
    const LocalState k3 = local_rhs(axpy(y, 0.5 * tau, k2), n0, n1, dV, params);
    const LocalState k4 = local_rhs(axpy(y, tau, k3), n0, n1, dV, params);
    const double h6 = tau / 6.0;
    auto combine = [&](double yv, double a, double b, double c, double d) {
      return yv + h6 * (a + 2.0 * b + 2.0 * c + d);
    };
    cell.J[0] = combine(y.J0, k1.J0, k2.J0, k3.J0, k4.J0);
    cell.J[1] = combine(y.J1, k1.J1, k2.J1, k3.J1, k4.J1);
    cell.n[2] = combine(y.n2, k1.n2, k2.n2, k3.n2, k4.n2);
    cell.n[3] = combine(y.n3, k1.n3, k2.n3, k3.n3, k4.n3);
    cell.J[2] = combine(y.J2, k1.J2, k2.J2, k3.J2, k4.J2);
    cell.J[3] = combine(y.J3, k1.J3, k2.J3, k3.J3, k4.J3);
    return;
  }
  // Exact for V' = 0; otherwise coefficients frozen at the midpoint value of J_0.
  const double J0_mid = cell.J[0] - 0.5 * tau * n0 * dV;
  const Matrix2c E = expm(spin_matrix(spin_coefficients(n0, J0_mid, params), dV, params.omega()), tau);
  const Complex z(cell.n[2], cell.n[3]);
  const Complex Z(cell.J[2], cell.J[3]);
  const Complex z_new = E.m11 * z + E.m12 * Z;
  const Complex Z_new = E.m21 * z + E.m22 * Z;
  cell.n[2] = z_new.real();
  cell.n[3] = z_new.imag();
  cell.J[2] = Z_new.real();
  cell.J[3] = Z_new.imag();
  if (dV != 0.0) {
    cell.J[0] -= tau * n0 * dV;
    cell.J[1] -= tau * n1 * dV;
  }
}

void local_half(Field1D& f, const std::vector<double>& dV, double tau,
                RotationIntegrator integrator, const PhysParams& params) {
  for (std::size_t i = 0; i < f.cells.size(); ++i) {
    local_step(f.cells[i], dV.empty() ? 0.0 : dV[i], tau, integrator, params);
  }
}

// Upwind flux of the pair (u, v) with flux (v_F v, v_F u): the invariant
// u + v travels right and u - v travels left.
struct PairFlux {
  double fu, fv;
};

PairFlux upwind_flux(double uL, double vL, double uR, double vR, double vF) {
  const double right_going = uL + vL;
  const double left_going = uR - vR;
  return {0.5 * vF * (right_going - left_going), 0.5 * vF * (right_going + left_going)};
}

// Shift applied to (J_0, J_1) when crossing a face with potential jump dV
// from left to right: v_F [J_0] = -n_1 [V], v_F [J_1] = -n_0 [V].
struct FaceJump {
  double dV = 0.0;
};

void transport(Field1D& f, double dt, const std::vector<FaceJump>& jumps, const PhysParams& params) {
  const int n = static_cast<int>(f.cells.size());
  const double vF = params.v_F;
  const double lambda = dt / f.grid.dr();
  // For each face: flux seen by the cell on its left and by the cell on its right.
  std::vector<PairFlux> n_flux(static_cast<std::size_t>(n + 1));
  std::vector<PairFlux> j_flux_left(static_cast<std::size_t>(n + 1));
  std::vector<PairFlux> j_flux_right(static_cast<std::size_t>(n + 1));
  for (int face = 0; face <= n; ++face) {
    const Cell1D& L = neighbor(f, face - 1);
    const Cell1D& R = neighbor(f, face);
    const auto idx = static_cast<std::size_t>(face);
    n_flux[idx] = upwind_flux(L.n[0], L.n[1], R.n[0], R.n[1], vF);
    const double dV = jumps.empty() ? 0.0 : jumps[idx].dV;
    if (dV == 0.0) {
      j_flux_left[idx] = upwind_flux(L.J[0], L.J[1], R.J[0], R.J[1], vF);
      j_flux_right[idx] = j_flux_left[idx];
    } else {
      const double n0f = 0.5 * (L.n[0] + R.n[0]);
      const double n1f = 0.5 * (L.n[1] + R.n[1]);
      const double s0 = n1f * dV / vF;
      const double s1 = n0f * dV / vF;
      j_flux_left[idx] = upwind_flux(L.J[0], L.J[1], R.J[0] + s0, R.J[1] + s1, vF);
      j_flux_right[idx] = upwind_flux(L.J[0] - s0, L.J[1] - s1, R.J[0], R.J[1], vF);
    }
  }
  for (int i = 0; i < n; ++i) {
    auto& c = f.cells[static_cast<std::size_t>(i)];
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(i + 1);
    c.n[0] -= lambda * (n_flux[hi].fu - n_flux[lo].fu);
    c.n[1] -= lambda * (n_flux[hi].fv - n_flux[lo].fv);
    c.J[0] -= lambda * (j_flux_left[hi].fu - j_flux_right[lo].fu);
    c.J[1] -= lambda * (j_flux_left[hi].fv - j_flux_right[lo].fv);
  }
}

void check_dt(const Field1D& f, const std::vector<double>& dV, double dt,
              const SolverConfig1D& cfg, const PhysParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const double cap = cfg.cfl * f.grid.dr() / params.v_F;
  if (dt > cap * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "step: CFL violation, dt = " << dt << " exceeds cfl*dr/v_F = " << cap;
    throw std::invalid_argument(msg.str());
  }
  if (cfg.rotation == RotationIntegrator::rk4) {
    double rate = 0.0;
    for (std::size_t i = 0; i < f.cells.size(); ++i) {
      const auto& c = f.cells[i];
      rate = std::max(rate, spin_rate(spin_matrix(spin_coefficients(c.n[0], c.J[0], params),
                                                  dV.empty() ? 0.0 : dV[i], params.omega())));
    }
    if (rate * dt > 0.5 * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "step: spin-rotation stiffness limit violated, rate*dt = " << rate * dt << " > 0.5";
      throw std::invalid_argument(msg.str());
    }
  }
}

Field1D split_step(const Field1D& f, const std::vector<double>& dV,
                   const std::vector<FaceJump>& jumps, double dt, const SolverConfig1D& cfg,
                   const PhysParams& params) {
  f.require_positive_density();
  check_dt(f, dV, dt, cfg, params);
  Field1D out = f;
  if (cfg.splitting == Splitting::strang) {
    local_half(out, dV, 0.5 * dt, cfg.rotation, params);
    transport(out, dt, jumps, params);
    local_half(out, dV, 0.5 * dt, cfg.rotation, params);
  } else {
    local_half(out, dV, dt, cfg.rotation, params);
    transport(out, dt, jumps, params);
  }
  out.require_positive_density();
  return out;
}

std::vector<FaceJump> barrier_jumps(const Field1D& f, const Barrier& barrier) {
  const auto faces = barrier.faces(f.grid);
  std::vector<FaceJump> jumps(f.cells.size() + 1);
  if (barrier.v0 != 0.0) {
    jumps[static_cast<std::size_t>(faces[0])].dV = barrier.v0;
    jumps[static_cast<std::size_t>(faces[1])].dV = -barrier.v0;
  }
  return jumps;
}

double max_abs_current(const Field1D& f) {
  double m = 0.0;
  for (const auto& c : f.cells) {
    for (double j : c.J) m = std::max(m, std::abs(j));
  }
  return m;
}

}  // namespace

std::vector<double> Grid1D::centers() const {
  std::vector<double> out(static_cast<std::size_t>(cells));
  for (int i = 0; i < cells; ++i) out[static_cast<std::size_t>(i)] = center(i);
  return out;
}

void Grid1D::validate() const {
  if (!(r_max > r_min)) throw std::invalid_argument("grid: r_max must exceed r_min");
  if (cells < 8) throw std::invalid_argument("grid: at least 8 cells are required");
}

Field1D Field1D::uniform(const Grid1D& grid, BoundaryCondition bc, const Cell1D& value) {
  grid.validate();
  return Field1D{grid, bc, std::vector<Cell1D>(static_cast<std::size_t>(grid.cells), value)};
}

Field1D Field1D::from_function(const Grid1D& grid, BoundaryCondition bc,
                               const std::function<Cell1D(double)>& init) {
  grid.validate();
  Field1D f{grid, bc, {}};
  f.cells.reserve(static_cast<std::size_t>(grid.cells));
  for (int i = 0; i < grid.cells; ++i) f.cells.push_back(init(grid.center(i)));
  return f;
}

void Field1D::require_positive_density() const {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!(cells[i].n[0] > kDensityFloor)) {
      std::ostringstream msg;
      msg << "n_0 <= " << kDensityFloor << " in cell " << i << " (r = "
          << grid.center(static_cast<int>(i)) << ", n_0 = " << cells[i].n[0] << ")";
      throw DomainError(msg.str());
    }
  }
}

std::array<int, 2> Barrier::faces(const Grid1D& grid) const {
  if (!(a < b)) throw std::invalid_argument("barrier: a must be less than b");
  std::array<int, 2> out{};
  const std::array<double, 2> edges{a, b};
  for (std::size_t e = 0; e < 2; ++e) {
    const double pos = (edges[e] - grid.r_min) / grid.dr();
    const double idx = std::round(pos);
    if (std::abs(pos - idx) > 1e-9 * std::max(1.0, std::abs(pos))) {
      throw std::invalid_argument("barrier: edge " + std::string(e == 0 ? "a" : "b") +
                                  " is not on a cell face");
    }
    if (idx < 1 || idx > grid.cells - 1) {
      throw std::invalid_argument("barrier: edges must lie strictly inside the domain");
    }
    out[e] = static_cast<int>(idx);
  }
  return out;
}

Potential1D Potential1D::zero(const Grid1D& grid) {
  const auto n = static_cast<std::size_t>(grid.cells);
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

Potential1D Potential1D::sample(const Grid1D& grid, const std::function<double(double)>& V,
                                const std::function<double(double)>& dV) {
  Potential1D out;
  for (int i = 0; i < grid.cells; ++i) {
    out.V.push_back(V(grid.center(i)));
    out.dV.push_back(dV(grid.center(i)));
  }
  return out;
}

void SolverConfig1D::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl: must lie in (0, 1]");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end: must be positive");
  if (output_stride < 0) throw std::invalid_argument("stride: must be non-negative");
}

double stable_dt(const Field1D& f, const Potential1D& V, const SolverConfig1D& cfg,
                 const PhysParams& params) {
  double dt = cfg.cfl * f.grid.dr() / params.v_F;
  if (cfg.rotation == RotationIntegrator::rk4) {
    double rate = 0.0;
    for (std::size_t i = 0; i < f.cells.size(); ++i) {
      const auto& c = f.cells[i];
      const double dV = V.dV.empty() ? 0.0 : V.dV[i];
      rate = std::max(rate, spin_rate(spin_matrix(spin_coefficients(c.n[0], c.J[0], params), dV,
                                                  params.omega())));
    }
    if (rate > 0.0) dt = std::min(dt, 0.5 / rate);
  }
  return dt;
}

Field1D rhs_smooth(const Field1D& f, const Potential1D& V, const PhysParams& params) {
  f.require_positive_density();
  const int n = static_cast<int>(f.cells.size());
  const double vF = params.v_F;
  const double w = params.omega();
  const double inv2dr = 1.0 / (2.0 * f.grid.dr());
  Field1D out{f.grid, f.bc, std::vector<Cell1D>(f.cells.size())};
  for (int i = 0; i < n; ++i) {
    const Cell1D& c = f.cells[static_cast<std::size_t>(i)];
    const Cell1D& L = neighbor(f, i - 1);
    const Cell1D& R = neighbor(f, i + 1);
    const double dV = V.dV.empty() ? 0.0 : V.dV[static_cast<std::size_t>(i)];
    const auto k = spin_coefficients(c.n[0], c.J[0], params);
    Cell1D& d = out.cells[static_cast<std::size_t>(i)];
    // (n_0, n_1, J_0, J_1) block: transport plus potential force.
    d.n[0] = -vF * (R.n[1] - L.n[1]) * inv2dr;
    d.n[1] = -vF * (R.n[0] - L.n[0]) * inv2dr;
    d.J[0] = -vF * (R.J[1] - L.J[1]) * inv2dr - c.n[0] * dV;
    d.J[1] = -vF * (R.J[0] - L.J[0]) * inv2dr - c.n[1] * dV;
    // (n_2, n_3, J_2, J_3) block: spin rotation plus potential force.
    d.n[2] = -w * c.J[3];
    d.n[3] = w * c.J[2];
    d.J[2] = -w * (k.a * c.n[3] + k.b * c.J[3]) - c.n[2] * dV;
    d.J[3] = w * (k.a * c.n[2] + k.b * c.J[2]) - c.n[3] * dV;
  }
  return out;
}

Field1D step(const Field1D& f, const Potential1D& V, double dt, const SolverConfig1D& cfg,
             const PhysParams& params) {
  return split_step(f, V.dV, {}, dt, cfg, params);
}

Field1D step_barrier(const Field1D& f, const Barrier& barrier, double dt,
                     const SolverConfig1D& cfg, const PhysParams& params) {
  const auto jumps = barrier_jumps(f, barrier);
  Field1D out = split_step(f, {}, jumps, dt, cfg, params);
  if (barrier.v0 != 0.0) {
    // n_2 [V] = n_3 [V] = 0 at both edges.
    for (int face : barrier.faces(f.grid)) {
      for (int i : {face - 1, face}) {
        auto& c = out.cells[static_cast<std::size_t>(i)];
        c.n[2] = 0.0;
        c.n[3] = 0.0;
      }
    }
  }
  return out;
}

double JumpResidual::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

JumpResidual jump_residual(const Field1D& f, const Barrier& barrier, const PhysParams& params) {
  const auto faces = barrier.faces(f.grid);
  JumpResidual out;
  std::array<double, 2> n2{}, n3{};
  for (std::size_t e = 0; e < 2; ++e) {
    const int face = faces[e];
    const Cell1D& L = f.cells[static_cast<std::size_t>(face - 1)];
    const Cell1D& R = f.cells[static_cast<std::size_t>(face)];
    const double jumpV = barrier.potential(f.grid.center(face)) -
                         barrier.potential(f.grid.center(face - 1));
    const double n0 = 0.5 * (L.n[0] + R.n[0]);
    const double n1 = 0.5 * (L.n[1] + R.n[1]);
    out.values[e] = params.v_F * (R.J[1] - L.J[1]) + n0 * jumpV;
    out.values[2 + e] = params.v_F * (R.J[0] - L.J[0]) + n1 * jumpV;
    n2[e] = 0.5 * (L.n[2] + R.n[2]);
    n3[e] = 0.5 * (L.n[3] + R.n[3]);
  }
  out.values[4] = std::abs(n2[0]) >= std::abs(n2[1]) ? n2[0] : n2[1];
  out.values[5] = std::abs(n3[0]) >= std::abs(n3[1]) ? n3[0] : n3[1];
  return out;
}

namespace {

template <typename Stepper>
Trajectory1D integrate(const Field1D& initial, const SolverConfig1D& cfg, const Potential1D& V,
                       const PhysParams& params, Stepper&& advance) {
  cfg.validate();
  params.validate();
  initial.require_positive_density();
  Trajectory1D traj;
  traj.dt = stable_dt(initial, V, cfg, params);
  const double mass0 = total_mass(initial);
  traj.times.push_back(0.0);
  traj.snapshots.push_back(initial);

  Field1D f = initial;
  double t = 0.0;
  while (t < cfg.t_end * (1.0 - 1e-14)) {
    const double dt_max = stable_dt(f, V, cfg, params);
    const double dt = std::min(dt_max, cfg.t_end - t);
    f = advance(f, dt);
    t = (cfg.t_end - t <= dt_max) ? cfg.t_end : t + dt;
    ++traj.steps;
    if (cfg.output_stride > 0 && traj.steps % cfg.output_stride == 0 && t < cfg.t_end) {
      traj.times.push_back(t);
      traj.snapshots.push_back(f);
    }
  }
  traj.times.push_back(t);
  traj.snapshots.push_back(f);
  traj.mass_drift = std::abs(total_mass(f) - mass0) / std::abs(mass0);
  return traj;
}

}  // namespace

Trajectory1D run_smooth(const Field1D& initial, const Potential1D& V, const SolverConfig1D& cfg,
                        const PhysParams& params) {
  return integrate(initial, cfg, V, params, [&](const Field1D& f, double dt) {
    return step(f, V, dt, cfg, params);
  });
}

Trajectory1D run_barrier(const Field1D& initial, const Barrier& barrier,
                         const SolverConfig1D& cfg, const PhysParams& params) {
  const JumpResidual r0 = jump_residual(initial, barrier, params);
  const double tol = 1e-8 * std::max(1.0, params.v_F * max_abs_current(initial));
  if (r0.max_abs() > tol) {
    std::ostringstream msg;
    msg << "run_barrier: initial field violates the jump conditions (tolerance " << tol
        << "): residuals";
    for (double v : r0.values) msg << ' ' << v;
    throw DomainError(msg.str());
  }
  double worst = r0.max_abs();
  Trajectory1D traj =
      integrate(initial, cfg, Potential1D{}, params, [&](const Field1D& f, double dt) {
        Field1D next = step_barrier(f, barrier, dt, cfg, params);
        worst = std::max(worst, jump_residual(next, barrier, params).max_abs());
        return next;
      });
  traj.max_jump_residual = worst;
  return traj;
}

Field1D piecewise_constant(double beta0, double beta1, double n0, double n1,
                           const Barrier& barrier, const Grid1D& grid, BoundaryCondition bc,
                           const PhysParams& params) {
  if (!(n0 > 0.0)) throw DomainError("piecewise_constant: n_0 must be positive");
  return Field1D::from_function(grid, bc, [&](double r) {
    const double V = barrier.potential(r);
    Cell1D c;
    c.n = {n0, n1, 0.0, 0.0};
    c.J = {(beta0 - n1 * V) / params.v_F, (beta1 - n0 * V) / params.v_F, 0.0, 0.0};
    return c;
  });
}

double energy_density(double n0, double J1, double V, const PhysParams& params) {
  if (!(n0 > 0.0)) throw DomainError("energy_density: n_0 must be positive");
  return params.v_F * J1 / n0 + 0.5 * params.theta + V;
}

PdeResidual1D pde_residual(const Field1D& before, const Field1D& after, double dt,
                           const Potential1D& V, const PhysParams& params,
                           const Barrier* barrier) {
  if (before.cells.size() != after.cells.size()) {
    throw std::invalid_argument("pde_residual: snapshots must share a grid");
  }
  const int n = static_cast<int>(before.cells.size());
  if (n < 3) throw std::invalid_argument("pde_residual: need at least 3 cells");
  std::vector<char> skip(static_cast<std::size_t>(n), 0);
  if (before.bc == BoundaryCondition::outflow) {
    skip.front() = 1;
    skip.back() = 1;
  }
  if (barrier != nullptr) {
    for (int face : barrier->faces(before.grid)) {
      skip[static_cast<std::size_t>(face - 1)] = 1;
      skip[static_cast<std::size_t>(face)] = 1;
    }
  }
  // Time-centered state.
  Field1D mid = before;
  for (std::size_t i = 0; i < mid.cells.size(); ++i) {
    for (std::size_t s = 0; s < 4; ++s) {
      mid.cells[i].n[s] = 0.5 * (before.cells[i].n[s] + after.cells[i].n[s]);
      mid.cells[i].J[s] = 0.5 * (before.cells[i].J[s] + after.cells[i].J[s]);
    }
  }
  const Field1D rate = rhs_smooth(mid, V, params);
  PdeResidual1D out;
  out.cells.assign(static_cast<std::size_t>(n), {});
  out.evaluated.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    if (skip[i]) continue;
    auto& r = out.cells[i];
    for (std::size_t s = 0; s < 4; ++s) {
      r[s] = (after.cells[i].n[s] - before.cells[i].n[s]) / dt - rate.cells[i].n[s];
      r[4 + s] = (after.cells[i].J[s] - before.cells[i].J[s]) / dt - rate.cells[i].J[s];
    }
    out.evaluated[i] = 1;
    for (double v : r) out.max_abs = std::max(out.max_abs, std::abs(v));
  }
  return out;
}

double total_mass(const Field1D& f) {
  std::vector<double> mass(f.cells.size());
  for (std::size_t i = 0; i < f.cells.size(); ++i) mass[i] = f.cells[i].n[0];
  return pairwise_sum(mass) * f.grid.dr();
}

double spin_block_invariant(const Cell1D& cell, const PhysParams& params) {
  const auto c = spin_coefficients(cell.n[0], cell.J[0], params);
  return c.a * (cell.n[2] * cell.n[2] + cell.n[3] * cell.n[3]) + cell.J[2] * cell.J[2] +
         cell.J[3] * cell.J[3];
}

}  // namespace qfd

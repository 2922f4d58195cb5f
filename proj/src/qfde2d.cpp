#include "qfd/qfde2d.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qfd/pauli.hpp"

namespace qfd {

namespace {

// Cell-local part of the 12-moment system: spin precession terms and
// potential forces. n_0 is invariant under it.
MomentState local_rhs(const MomentState& u, const Vec2& gradV, const PhysParams& params) {
  const double w = params.omega();
  const ClosureTensor L = closure_tensor(u, params);
  MomentState d;
  for (int i = 0; i < 2; ++i) d.J[0][static_cast<std::size_t>(i)] = -u.n[0] * gradV[static_cast<std::size_t>(i)];
  for (int s = 1; s <= 3; ++s) {
    const auto si = static_cast<std::size_t>(s);
    double dn = 0.0;
    Vec2 dJ{0.0, 0.0};
    for (int k = 1; k <= 2; ++k) {
      for (int j = 1; j <= 3; ++j) {
        const int eta = levi_civita(s, k, j);
        if (eta == 0) continue;
        dn += eta * u.J[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)];
        for (int i = 1; i <= 2; ++i) {
          dJ[static_cast<std::size_t>(i - 1)] += eta * L(j, i - 1, k - 1);
        }
      }
    }
    d.n[si] = w * dn;
    for (std::size_t i = 0; i < 2; ++i) d.J[si][i] = w * dJ[i] - u.n[si] * gradV[i];
  }
  return d;
}

MomentState axpy(const MomentState& y, double h, const MomentState& k) {
  MomentState out = y;
  for (std::size_t s = 0; s < 4; ++s) {
    out.n[s] += h * k.n[s];
    out.J[s][0] += h * k.J[s][0];
    out.J[s][1] += h * k.J[s][1];
  }
  return out;
}

MomentState rk4(const MomentState& y, const Vec2& gradV, double tau, const PhysParams& params) {
  const MomentState k1 = local_rhs(y, gradV, params);
  const MomentState k2 = local_rhs(axpy(y, 0.5 * tau, k1), gradV, params);
  const MomentState k3 = local_rhs(axpy(y, 0.5 * tau, k2), gradV, params);
  const MomentState k4 = local_rhs(axpy(y, tau, k3), gradV, params);
  MomentState out = y;
  const double h6 = tau / 6.0;
  for (std::size_t s = 0; s < 4; ++s) {
    out.n[s] += h6 * (k1.n[s] + 2.0 * k2.n[s] + 2.0 * k3.n[s] + k4.n[s]);
    for (std::size_t i = 0; i < 2; ++i) {
      out.J[s][i] += h6 * (k1.J[s][i] + 2.0 * k2.J[s][i] + 2.0 * k3.J[s][i] + k4.J[s][i]);
    }
  }
  return out;
}

// Bound on the local precession rate. For the frozen linearization the
// eigenvalues are i w (b +- sqrt(b^2 + 4a)) / 2 with |a| <= m theta + |u_0|^2
// and |b| = 2|u_0|; the potential adds a coupling of size |grad V| / w.
double local_rate(const MomentState& u, const Vec2& gradV, const PhysParams& params) {
  const double speed = std::hypot(u.J[0][0], u.J[0][1]) / u.n[0];
  const double force = std::hypot(gradV[0], gradV[1]) / params.omega();
  return params.omega() * (speed + std::sqrt(params.m_theta() + 2.0 * speed * speed + force));
}

void local_half(Field2D& f, const Potential2D& V, double tau, const PhysParams& params) {
  for (std::size_t c = 0; c < f.cells.size(); ++c) {
    const Vec2 g = V.grad.empty() ? Vec2{0.0, 0.0} : V.grad[c];
    f.cells[c] = rk4(f.cells[c], g, tau, params);
  }
}

// Upwind flux for a pair (u, v) with flux (v_F v, v_F u) in one direction.
struct PairFlux {
  double fu, fv;
};

PairFlux upwind(double uL, double vL, double uR, double vR, double vF) {
  const double right_going = uL + vL;
  const double left_going = uR - vR;
  return {0.5 * vF * (right_going - left_going), 0.5 * vF * (right_going + left_going)};
}

// Transported pairs along direction d (0 = x, 1 = y): (n_0, n_{d+1}) and
// (J_0^i, J_{d+1}^i). Components without flux in that direction are left
// untouched.
void accumulate_direction(const Field2D& f, Field2D& out, int dir, double lambda, double vF) {
  const Grid2D& g = f.grid;
  const auto partner = static_cast<std::size_t>(dir + 1);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int di = dir == 0 ? 1 : 0;
      const int dj = dir == 1 ? 1 : 0;
      const MomentState& C = f.at(i, j);
      const MomentState& L = f.at(i - di, j - dj);
      const MomentState& R = f.at(i + di, j + dj);
      MomentState& o = out.at(i, j);
      {
        const PairFlux lo = upwind(L.n[0], L.n[partner], C.n[0], C.n[partner], vF);
        const PairFlux hi = upwind(C.n[0], C.n[partner], R.n[0], R.n[partner], vF);
        o.n[0] -= lambda * (hi.fu - lo.fu);
        o.n[partner] -= lambda * (hi.fv - lo.fv);
      }
      for (std::size_t c = 0; c < 2; ++c) {
        const PairFlux lo = upwind(L.J[0][c], L.J[partner][c], C.J[0][c], C.J[partner][c], vF);
        const PairFlux hi = upwind(C.J[0][c], C.J[partner][c], R.J[0][c], R.J[partner][c], vF);
        o.J[0][c] -= lambda * (hi.fu - lo.fu);
        o.J[partner][c] -= lambda * (hi.fv - lo.fv);
      }
    }
  }
}

void transport(Field2D& f, double dt, const PhysParams& params) {
  const Field2D old = f;
  accumulate_direction(old, f, 0, dt / f.grid.dx(), params.v_F);
  accumulate_direction(old, f, 1, dt / f.grid.dy(), params.v_F);
}

double max_rate(const Field2D& f, const Potential2D& V, const PhysParams& params) {
  double rate = 0.0;
  for (std::size_t c = 0; c < f.cells.size(); ++c) {
    const Vec2 g = V.grad.empty() ? Vec2{0.0, 0.0} : V.grad[c];
    rate = std::max(rate, local_rate(f.cells[c], g, params));
  }
  return rate;
}

}  // namespace

void Grid2D::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min)) {
    throw std::invalid_argument("grid: domain extents must be positive");
  }
  if (nx < 8 || ny < 8) throw std::invalid_argument("grid: nx and ny must be >= 8");
}

std::size_t Field2D::index(int i, int j) const {
  const int ii = (i % grid.nx + grid.nx) % grid.nx;
  const int jj = (j % grid.ny + grid.ny) % grid.ny;
  return static_cast<std::size_t>(jj) * static_cast<std::size_t>(grid.nx) +
         static_cast<std::size_t>(ii);
}

Field2D Field2D::uniform(const Grid2D& grid, const MomentState& value) {
  grid.validate();
  return Field2D{grid, std::vector<MomentState>(static_cast<std::size_t>(grid.nx * grid.ny), value)};
}

Field2D Field2D::from_function(const Grid2D& grid,
                               const std::function<MomentState(const Vec2&)>& init) {
  grid.validate();
  Field2D f{grid, std::vector<MomentState>(static_cast<std::size_t>(grid.nx * grid.ny))};
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) f.at(i, j) = init(grid.center(i, j));
  }
  return f;
}

void Field2D::require_positive_density() const {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!(cells[c].n[0] > kDensityFloor)) {
      std::ostringstream msg;
      msg << "n_0 <= " << kDensityFloor << " in cell (" << c % static_cast<std::size_t>(grid.nx)
          << ", " << c / static_cast<std::size_t>(grid.nx) << "), n_0 = " << cells[c].n[0];
      throw DomainError(msg.str());
    }
  }
}

Potential2D Potential2D::zero(const Grid2D& grid) {
  const auto n = static_cast<std::size_t>(grid.nx * grid.ny);
  return {std::vector<double>(n, 0.0), std::vector<Vec2>(n, Vec2{0.0, 0.0})};
}

Potential2D Potential2D::sample(const Grid2D& grid, const std::function<double(const Vec2&)>& V,
                                const std::function<Vec2(const Vec2&)>& grad) {
  Potential2D out;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 r = grid.center(i, j);
      out.V.push_back(V(r));
      out.grad.push_back(grad(r));
    }
  }
  return out;
}

void SolverConfig2D::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl: must lie in (0, 1]");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end: must be positive");
  if (output_stride < 0) throw std::invalid_argument("stride: must be non-negative");
}

Field2D rhs_2d(const Field2D& f, const Potential2D& V, const PhysParams& params) {
  f.require_positive_density();
  const Grid2D& g = f.grid;
  const double vF = params.v_F;
  const double cx = 1.0 / (2.0 * g.dx());
  const double cy = 1.0 / (2.0 * g.dy());
  Field2D out{g, std::vector<MomentState>(f.cells.size())};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t c = f.index(i, j);
      const Vec2 gradV = V.grad.empty() ? Vec2{0.0, 0.0} : V.grad[c];
      MomentState d = local_rhs(f.cells[c], gradV, params);
      // Central differences d/dx, d/dy of every component; d^3 = 0.
      const MomentState& xp = f.at(i + 1, j);
      const MomentState& xm = f.at(i - 1, j);
      const MomentState& yp = f.at(i, j + 1);
      const MomentState& ym = f.at(i, j - 1);
      auto dn = [&](std::size_t s, int axis) {
        return axis == 0 ? (xp.n[s] - xm.n[s]) * cx : (yp.n[s] - ym.n[s]) * cy;
      };
      auto dJ = [&](std::size_t s, std::size_t comp, int axis) {
        return axis == 0 ? (xp.J[s][comp] - xm.J[s][comp]) * cx
                         : (yp.J[s][comp] - ym.J[s][comp]) * cy;
      };
      d.n[0] -= vF * (dn(1, 0) + dn(2, 1));
      d.n[1] -= vF * dn(0, 0);
      d.n[2] -= vF * dn(0, 1);
      for (std::size_t comp = 0; comp < 2; ++comp) {
        d.J[0][comp] -= vF * (dJ(1, comp, 0) + dJ(2, comp, 1));
        d.J[1][comp] -= vF * dJ(0, comp, 0);
        d.J[2][comp] -= vF * dJ(0, comp, 1);
      }
      out.cells[c] = d;
    }
  }
  return out;
}

MomentState uniform_ode_rhs(const MomentState& u, const PhysParams& params) {
  if (!(u.n[0] > 0.0)) throw DomainError("uniform_ode_rhs: n_0 must be positive");
  return local_rhs(u, Vec2{0.0, 0.0}, params);
}

double stable_dt_2d(const Field2D& f, const Potential2D& V, const SolverConfig2D& cfg,
                    const PhysParams& params) {
  const double transport_cap = cfg.cfl * std::min(f.grid.dx(), f.grid.dy()) / (2.0 * params.v_F);
  const double rate = max_rate(f, V, params);
  return rate > 0.0 ? std::min(transport_cap, 0.5 / rate) : transport_cap;
}

Field2D step_2d(const Field2D& f, const Potential2D& V, double dt, const SolverConfig2D& cfg,
                const PhysParams& params) {
  f.require_positive_density();
  if (!(dt > 0.0)) throw std::invalid_argument("step_2d: dt must be positive");
  const double transport_cap = cfg.cfl * std::min(f.grid.dx(), f.grid.dy()) / (2.0 * params.v_F);
  if (dt > transport_cap * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "step_2d: CFL violation, dt = " << dt << " exceeds " << transport_cap;
    throw std::invalid_argument(msg.str());
  }
  if (max_rate(f, V, params) * dt > 0.5 * (1.0 + 1e-12)) {
    throw std::invalid_argument("step_2d: spin-rotation stiffness limit violated");
  }
  Field2D out = f;
  local_half(out, V, 0.5 * dt, params);
  transport(out, dt, params);
  local_half(out, V, 0.5 * dt, params);
  out.require_positive_density();
#ifndef NDEBUG
  for (const auto& cell : out.cells) {
    const ClosureTensor L = closure_tensor(cell, params);
    for (int s = 1; s <= 3; ++s) {
      assert(std::abs(L(s, 0, 1) - L(s, 1, 0)) <=
             1e-12 * (std::abs(L(s, 0, 1)) + std::abs(L(s, 1, 0)) + 1e-300));
    }
  }
#endif
  return out;
}

ConservedTotals conserved_totals(const Field2D& f) {
  std::vector<double> mass(f.cells.size()), px(f.cells.size()), py(f.cells.size());
  for (std::size_t c = 0; c < f.cells.size(); ++c) {
    mass[c] = f.cells[c].n[0];
    px[c] = f.cells[c].J[0][0];
    py[c] = f.cells[c].J[0][1];
  }
  const double area = f.grid.cell_area();
  return {pairwise_sum(mass) * area, {pairwise_sum(px) * area, pairwise_sum(py) * area}};
}

Trajectory2D run_2d(const Field2D& initial, const Potential2D& V, const SolverConfig2D& cfg,
                    const PhysParams& params) {
  cfg.validate();
  params.validate();
  initial.require_positive_density();
  Trajectory2D traj;
  traj.dt = stable_dt_2d(initial, V, cfg, params);
  const double mass0 = conserved_totals(initial).mass;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(initial);

  auto audit = [&](const Field2D& f) {
    for (const auto& cell : f.cells) {
      double ratio = 0.0;
      double bound = 0.0;
      try {
        const MixednessReport r = mixedness_check(cell, params);
        ratio = r.ratio;
        bound = r.bound;
      } catch (const DomainError&) {
        // An undefined spin velocity is the K -> infinity limit: bound 0.
        const double nv = cell.n[1] * cell.n[1] + cell.n[2] * cell.n[2] + cell.n[3] * cell.n[3];
        ratio = nv / (cell.n[0] * cell.n[0]);
      }
      traj.worst_margin = std::min(traj.worst_margin, bound - ratio);
      if (ratio > bound) ++traj.mixedness_warnings;
    }
  };
  audit(initial);

  Field2D f = initial;
  double t = 0.0;
  while (t < cfg.t_end * (1.0 - 1e-14)) {
    const double dt_max = stable_dt_2d(f, V, cfg, params);
    const double dt = std::min(dt_max, cfg.t_end - t);
    f = step_2d(f, V, dt, cfg, params);
    t = (cfg.t_end - t <= dt_max) ? cfg.t_end : t + dt;
    ++traj.steps;
    audit(f);
    if (cfg.output_stride > 0 && traj.steps % cfg.output_stride == 0 && t < cfg.t_end) {
      traj.times.push_back(t);
      traj.snapshots.push_back(f);
    }
  }
  traj.times.push_back(t);
  traj.snapshots.push_back(f);
  traj.mass_drift = std::abs(conserved_totals(f).mass - mass0) / std::abs(mass0);
  return traj;
}

}  // namespace qfd

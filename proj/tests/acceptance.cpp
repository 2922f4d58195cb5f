// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qfd/equilibrium.hpp"
#include "qfd/purestate.hpp"
#include "qfd/qfde1d.hpp"
#include "qfd/qfde2d.hpp"

using namespace qfd;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

template <typename Fn>
void guarded(const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(false, name, std::string("threw: ") + e.what());
  }
}

double max_diff(const Field1D& a, const Field1D& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    for (std::size_t s = 0; s < 4; ++s) {
      m = std::max({m, std::abs(a.cells[i].n[s] - b.cells[i].n[s]),
                    std::abs(a.cells[i].J[s] - b.cells[i].J[s])});
    }
  }
  return m;
}

void closure_oracle() {
  const char* name = "closure oracle";
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  double worst_first = 0.0, worst_second = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    PhysParams params;
    params.m = pos(rng);
    params.theta = pos(rng);
    MomentState st;
    st.n[0] = pos(rng);
    for (std::size_t s = 1; s < 4; ++s) st.n[s] = 0.3 * st.n[0] * u(rng);
    for (auto& J : st.J) J = {u(rng), u(rng)};
    const MomentTable t = moments_via_quadrature(
        [&](const Vec2& p) { return equilibrium_strongly_mixed(st, params, p); },
        quadrature_for(st, params, 20));
    const ClosureTensor L = closure_tensor(st, params);
    double sn = 0.0, sJ = 0.0, sL = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      sn = std::max(sn, std::abs(st.n[s]));
      sJ = std::max({sJ, std::abs(st.J[s][0]), std::abs(st.J[s][1])});
    }
    for (int s = 1; s <= 3; ++s)
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) sL = std::max(sL, std::abs(L(s, i, k)));
    for (std::size_t s = 0; s < 4; ++s) {
      worst_first = std::max(worst_first, std::abs(t.n[s] - st.n[s]) / sn);
      for (std::size_t k = 0; k < 2; ++k) {
        worst_first = std::max(worst_first, std::abs(t.J[s][k] - st.J[s][k]) / sJ);
      }
    }
    for (int s = 1; s <= 3; ++s) {
      for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) {
          const double q = t.Q2[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]
                               [static_cast<std::size_t>(k)];
          worst_second = std::max(worst_second, std::abs(q - L(s, i, k)) / sL);
        }
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(worst_first <= 1e-8 && worst_second <= 1e-8 && secs < 10.0, name,
         fmt("50 states: first-moment rel err %.2e, second-moment rel err %.2e, %.3f s",
             worst_first, worst_second, secs));
}

void klein_equivalence() {
  const char* name = "Klein/piecewise-constant";
  const PhysParams params;
  const KleinState ks = klein_state(2.0, 1.0, 0.0, 1.0, params);
  const Barrier barrier{1.0, 0.0, 1.0};
  const Grid1D grid{-2.0, 3.0, 50};
  const double E = ks.energy();
  const auto [n_out, J_out] = klein_moments(ks, -1.0, params);
  const Field1D pc = piecewise_constant(n_out[1] * E, n_out[0] * E, n_out[0], n_out[1], barrier,
                                        grid, BoundaryCondition::outflow, params);
  bool exact = true;
  for (int i = 0; i < grid.cells; ++i) {
    const auto [n, J] = klein_moments(ks, grid.center(i), params);
    const Cell1D& c = pc.cells[static_cast<std::size_t>(i)];
    if (n != c.n || J != c.J) exact = false;
  }
  const double jump = jump_residual(pc, barrier, params).max_abs();
  double energy_jump = 0.0;
  for (int face : barrier.faces(grid)) {
    const Cell1D& L = pc.cells[static_cast<std::size_t>(face - 1)];
    const Cell1D& R = pc.cells[static_cast<std::size_t>(face)];
    const double hl = energy_density(L.n[0], L.J[1], barrier.potential(grid.center(face - 1)), params);
    const double hr = energy_density(R.n[0], R.J[1], barrier.potential(grid.center(face)), params);
    energy_jump = std::max(energy_jump, std::abs(hr - hl));
  }
  report(exact && jump <= 1e-14 && energy_jump <= 1e-14, name,
         fmt("cellwise identical: %s, jump residual %.1e, energy jump %.1e", exact ? "yes" : "no",
             jump, energy_jump));
}

void transmission_check() {
  const char* name = "transmission";
  double worst_T = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double q = -5.0 + 0.5 * i + 0.123;
    worst_T = std::max(worst_T, std::abs(transmission(0.0, q) - 1.0));
  }
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst_t = 0.0;
  int built = 0;
  while (built < 20) {
    PhysParams params;
    params.hbar = 0.5 + 0.1 * std::abs(u(rng));
    params.v_F = 0.5 + 0.1 * std::abs(u(rng));
    const double E = u(rng), V0 = u(rng), a = u(rng);
    const double b = a + 0.1 + std::abs(u(rng));
    if (E == 0.0 || E == V0) continue;
    const KleinState ks(E, V0, a, b, params);
    worst_t = std::max(worst_t, std::abs(std::abs(ks.t()) - 1.0));
    ++built;
  }
  report(worst_T <= 1e-14 && worst_t <= 1e-14, name,
         fmt("max |T(0,q) - 1| = %.1e over 20 q, max ||t| - 1| = %.1e over 20 states", worst_T,
             worst_t));
}

void barrier_steady() {
  const char* name = "barrier steady state";
  const PhysParams params;
  const Barrier barrier{1.0, 0.0, 1.0};
  const Grid1D grid{-4.0, 4.0, 512};
  const Field1D f =
      piecewise_constant(2.0, 2.0, 1.0, 1.0, barrier, grid, BoundaryCondition::outflow, params);
  SolverConfig1D cfg;
  cfg.t_end = 10.0;
  const Trajectory1D traj = run_barrier(f, barrier, cfg, params);
  const double drift = max_diff(f, traj.snapshots.back()) / cfg.t_end;
  report(drift <= 1e-10, name,
         fmt("512 cells, t = %.0f, %.0f steps: drift %.2e per unit time", cfg.t_end,
             static_cast<double>(traj.steps), drift));
}

void spin_block() {
  const char* name = "spin-block dynamics";
  PhysParams params;
  params.hbar = 2.0;
  Cell1D c;
  c.n = {1.0, 0.0, 1.0, 0.0};
  const Field1D f0 = Field1D::uniform(Grid1D{0.0, 100.0, 8}, BoundaryCondition::periodic, c);
  const Potential1D V = Potential1D::zero(f0.grid);

  SolverConfig1D exact;
  Field1D f = f0;
  double worst = 0.0;
  const double dt = 0.05;
  for (int k = 1; k <= 200; ++k) {
    f = step(f, V, dt, exact, params);
    const double t = k * dt;
    for (const auto& cell : f.cells) {
      worst = std::max({worst, std::abs(cell.n[2] - std::cos(t)), std::abs(cell.J[3] - std::sin(t))});
    }
  }

  SolverConfig1D rk;
  rk.rotation = RotationIntegrator::rk4;
  std::vector<double> err;
  for (double h : {0.4, 0.2, 0.1}) {
    Field1D g = f0;
    const long steps = std::lround(10.0 / h);
    for (long k = 0; k < steps; ++k) g = step(g, V, h, rk, params);
    err.push_back(std::max(std::abs(g.cells[0].n[2] - std::cos(10.0)),
                           std::abs(g.cells[0].J[3] - std::sin(10.0))));
  }
  const double o1 = std::log2(err[0] / err[1]);
  const double o2 = std::log2(err[1] / err[2]);
  report(worst <= 1e-12 && o1 >= 3.8 && o2 >= 3.8, name,
         fmt("exact max err %.1e (t <= 10); rk4 orders %.2f, %.2f", worst, o1, o2));
}

void wave_transport() {
  const char* name = "wave transport";
  const PhysParams params;
  SolverConfig1D cfg;
  cfg.t_end = 1.0;
  std::vector<double> err;
  double drift = 0.0;
  for (int cells : {128, 256, 512}) {
    const Grid1D grid{0.0, 1.0, cells};
    const Field1D f = Field1D::from_function(grid, BoundaryCondition::periodic, [](double r) {
      const double s = 0.1 * std::sin(2.0 * std::numbers::pi * r);
      Cell1D c;
      c.n = {1.0 + s, s, 0.0, 0.0};
      return c;
    });
    const Trajectory1D traj = run_smooth(f, Potential1D::zero(grid), cfg, params);
    drift = std::max(drift, traj.mass_drift);
    double e = 0.0;
    const Field1D& g = traj.snapshots.back();
    for (int i = 0; i < cells; ++i) {
      const double exact =
          1.0 + 0.1 * std::sin(2.0 * std::numbers::pi * (grid.center(i) - params.v_F * cfg.t_end));
      e += std::abs(g.cells[static_cast<std::size_t>(i)].n[0] - exact) * grid.dr();
    }
    err.push_back(e);
  }
  const double o1 = std::log2(err[0] / err[1]);
  const double o2 = std::log2(err[1] / err[2]);
  report(o1 >= 0.9 && o2 >= 0.9 && drift <= 1e-12, name,
         fmt("L1 orders %.3f, %.3f; max relative mass drift %.1e", o1, o2, drift));
}

double max_abs(const std::vector<Vec3>& v) {
  double m = 0.0;
  for (const auto& x : v)
    for (double y : x) m = std::max(m, std::abs(y));
  return m;
}

double saturation_defect(const SpinorMoments& m) {
  double worst = 0.0;
  for (const auto& n : m.n) {
    const double nv = std::sqrt(n[1] * n[1] + n[2] * n[2] + n[3] * n[3]);
    worst = std::max(worst, std::abs(nv - n[0]) / std::max(1.0, n[0]));
  }
  return worst;
}

void pure_state_identity() {
  const char* name = "pure-state identity";
  const PhysParams params;
  const oracle::Packet pk;
  std::vector<double> res;
  double defect = 0.0;
  for (int n : {128, 256, 512}) {
    const auto r = oracle::linspace(-4.0, 4.0, n);
    const SpinorMoments m = moments_from_spinor(pk.sample(r, true), params);
    res.push_back(max_abs(pure_state_identity_residual(r, m.n, m.J, params)));
    defect = std::max(defect, saturation_defect(m));
  }
  const double o1 = std::log2(res[0] / res[1]);
  const double o2 = std::log2(res[1] / res[2]);

  const auto r = oracle::linspace(-2.0, 2.0, 101);
  SpinorField1D plane;
  plane.r = r;
  for (double x : r) {
    const Complex e = std::exp(Complex(0.0, 1.3 * x));
    plane.psi1.push_back(e);
    plane.psi2.push_back(e);
    plane.dpsi1.push_back(Complex(0.0, 1.3) * e);
    plane.dpsi2.push_back(Complex(0.0, 1.3) * e);
  }
  const SpinorMoments pm = moments_from_spinor(plane, params);
  const double plane_res = max_abs(pure_state_identity_residual(r, pm.n, pm.J, params));
  defect = std::max(defect, saturation_defect(pm));
  const KleinState ks = klein_state(2.0, 1.0, 0.0, 1.0, params);
  defect = std::max(defect, saturation_defect(moments_from_spinor(ks.sample(r), params)));

  report(o1 >= 1.9 && o2 >= 1.9 && plane_res == 0.0 && defect <= 1e-12, name,
         fmt("packet orders %.3f, %.3f; plane-wave residual %.1e; max ||n_vec| - n_0| %.1e", o1,
             o2, plane_res, defect));
}

void homogeneous_2d() {
  const char* name = "homogeneous 2D oracle";
  const PhysParams params;
  MomentState u0;
  u0.n = {1.0, 0.1, -0.05, 0.08};
  u0.J[0] = {0.3, -0.2};
  u0.J[1] = {0.05, 0.02};
  u0.J[2] = {-0.03, 0.04};
  u0.J[3] = {0.01, -0.06};
  const Grid2D grid{0.0, 100.0, 0.0, 100.0, 8, 8};
  Field2D f = Field2D::uniform(grid, u0);
  const Potential2D V = Potential2D::zero(grid);
  for (int k = 0; k < 1000; ++k) f = step_2d(f, V, 1e-3, SolverConfig2D{}, params);
  const MomentState ref = oracle::unpack(oracle::homogeneous_integrate(oracle::pack(u0), 1.0, 1e-5, params));
  double err = 0.0, invariant = 0.0;
  for (const auto& c : f.cells) {
    for (std::size_t s = 0; s < 4; ++s) {
      err = std::max({err, std::abs(c.n[s] - ref.n[s]), std::abs(c.J[s][0] - ref.J[s][0]),
                      std::abs(c.J[s][1] - ref.J[s][1])});
    }
    invariant = std::max({invariant, std::abs(c.n[0] - u0.n[0]), std::abs(c.J[0][0] - u0.J[0][0]),
                          std::abs(c.J[0][1] - u0.J[0][1])});
  }
  report(err <= 1e-6 && invariant <= 1e-12, name,
         fmt("t = 1, dt = 1e-3 vs oracle dt = 1e-5: max err %.2e; n_0, J_0 drift %.1e", err,
             invariant));
}

void entropy_value() {
  const char* name = "entropy value";
  const PhysParams params;
  const std::vector<double> area{1.0};
  const PhaseSpaceSampler w = [](std::size_t, const Vec2& p) {
    return PauliComponents{
        {std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1])) / (2.0 * std::numbers::pi), 0.0, 0.0, 0.0}};
  };
  const double S = entropy_semiclassical(w, area, params, QuadratureSpec{});
  const double e1 = std::abs(S + std::log(2.0 * std::numbers::pi));
  const double c0 = c_of_lambda(0.0);
  const double e2 = std::abs(c_of_lambda(1.0 - 1e-10) - std::log(2.0));
  report(e1 <= 1e-6 && c0 == 0.0 && e2 <= 1e-6, name,
         fmt("|S + log 2pi| = %.1e, c(0) = %g, |c(1-1e-10) - log 2| = %.1e", e1, c0, e2));
}

void mixedness() {
  const char* name = "mixedness diagnostic";
  const PhysParams params;
  MomentState st;
  st.n = {1.0, 0.1, 0.0, 0.0};
  st.J[1] = {0.1, 0.0};
  const MixednessReport rep = mixedness_check(st, params);
  const double bound_err = std::abs(rep.bound - 0.75);

  // Pure-state presets: plane wave, spin-textured packet, Klein state.
  std::vector<MomentState> presets;
  const auto r = oracle::linspace(-2.0, 2.0, 41);
  const oracle::Packet pk;
  const KleinState ks = klein_state(2.0, 1.0, 0.0, 1.0, params);
  for (const SpinorMoments& m :
       {moments_from_spinor(pk.sample(r, true), params), moments_from_spinor(ks.sample(r), params)}) {
    for (std::size_t i = 0; i < r.size(); i += 10) {
      MomentState s;
      s.n = m.n[i];
      for (std::size_t c = 0; c < 4; ++c) s.J[c] = {m.J[i][c], 0.0};
      presets.push_back(s);
    }
  }
  double worst_ratio = 0.0;
  bool all_flagged = true;
  for (const auto& s : presets) {
    double ratio = 0.0;
    bool strongly = false;
    try {
      const MixednessReport p = mixedness_check(s, params);
      ratio = p.ratio;
      strongly = p.strongly_mixed();
    } catch (const DomainError&) {
      const double nv = s.n[1] * s.n[1] + s.n[2] * s.n[2] + s.n[3] * s.n[3];
      ratio = nv / (s.n[0] * s.n[0]);
    }
    worst_ratio = std::max(worst_ratio, std::abs(ratio - 1.0));
    if (strongly) all_flagged = false;
  }
  report(bound_err <= 1e-12 && worst_ratio <= 1e-12 && all_flagged, name,
         fmt("bound %.15f (ratio %.3f); pure presets max |ratio - 1| = %.1e, all flagged", rep.bound,
             rep.ratio, worst_ratio));
}

}  // namespace

int main() {
  guarded("closure oracle", closure_oracle);
  guarded("Klein/piecewise-constant", klein_equivalence);
  guarded("transmission", transmission_check);
  guarded("barrier steady state", barrier_steady);
  guarded("spin-block dynamics", spin_block);
  guarded("wave transport", wave_transport);
  guarded("pure-state identity", pure_state_identity);
  guarded("homogeneous 2D oracle", homogeneous_2d);
  guarded("entropy value", entropy_value);
  guarded("mixedness diagnostic", mixedness);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

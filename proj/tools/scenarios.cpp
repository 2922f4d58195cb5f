#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

namespace qfd::cli {

namespace {

using Json = nlohmann::ordered_json;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Re-raises a module precondition failure as a configuration error.
template <typename Fn>
void validated(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return r;
}

// ---------------------------------------------------------------------------
// Output

class CsvFile {
 public:
  CsvFile(const ScenarioConfig& cfg, const Settings& settings, const std::string& suffix,
          const std::vector<std::string>& columns)
      : path_(std::filesystem::path(cfg.output.dir) / (cfg.output.prefix + suffix + ".csv")) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output.dir, ec);
    os_.open(path_);
    if (!os_) throw ConfigError(fmt::format("dir: cannot write {}", path_.string()));
    fmt::print(os_, "# qfd {}\n", cfg.name);
    for (const auto& [section, entries] : settings.effective()) {
      fmt::print(os_, "# [{}]\n", section);
      for (const auto& [key, value] : entries) fmt::print(os_, "# {} = {}\n", key, value);
    }
    fmt::print(os_, "{}\n", fmt::join(columns, ","));
  }

  void row(const std::vector<double>& values) {
    bool first = true;
    for (double v : values) {
      if (!first) os_ << ',';
      os_ << format_number(v);
      first = false;
    }
    os_ << '\n';
  }

  std::string name() const { return path_.filename().string(); }

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

void write_manifest(const ScenarioConfig& cfg, const Settings& settings, const Json& derived,
                    const std::vector<std::string>& outputs) {
  Json config = Json::object();
  for (const auto& [section, entries] : settings.effective()) {
    Json s = Json::object();
    for (const auto& [key, value] : entries) s[key] = value;
    config[section] = s;
  }
  Json doc;
  doc["scenario"] = cfg.name;
  doc["config"] = config;
  doc["derived"] = derived;
  doc["outputs"] = outputs;
  const auto path = std::filesystem::path(cfg.output.dir) / (cfg.output.prefix + ".manifest.json");
  std::ofstream os(path);
  if (!os) throw ConfigError(fmt::format("dir: cannot write {}", path.string()));
  os << doc.dump(2) << '\n';
}

std::vector<std::string> columns_1d() {
  return {"t", "r", "n0", "n1", "n2", "n3", "J0", "J1", "J2", "J3"};
}

std::vector<std::string> columns_2d() {
  return {"t",   "x",   "y",   "n0",  "n1",  "n2",  "n3",  "J0x",
          "J0y", "J1x", "J1y", "J2x", "J2y", "J3x", "J3y"};
}

// ---------------------------------------------------------------------------
// Parsing

void parse_grid1d(Settings& s, ScenarioConfig& c, double r_min, double r_max, int cells,
                  const std::string& bc) {
  c.grid1d.r_min = s.number("grid", "r_min", r_min);
  c.grid1d.r_max = s.number("grid", "r_max", r_max);
  c.grid1d.cells = s.integer("grid", "cells", cells);
  c.bc = s.choice("grid", "bc", {"periodic", "outflow"}, bc) == "periodic"
             ? BoundaryCondition::periodic
             : BoundaryCondition::outflow;
  validated([&] { c.grid1d.validate(); });
}

void parse_potential(Settings& s, ScenarioConfig& c, bool two_d) {
  c.potential.kind = s.choice("scenario", "potential", {"none", "gaussian"}, "none");
  if (c.potential.kind == "none") return;
  c.potential.amplitude = s.number("scenario", "potential_amplitude", 0.1);
  c.potential.width = s.number("scenario", "potential_width", 0.1);
  require(c.potential.width > 0.0, "potential_width: must be positive");
  if (two_d) {
    c.potential.center_x = s.number("scenario", "potential_x", 0.5 * (c.grid2d.x_min + c.grid2d.x_max));
    c.potential.center_y = s.number("scenario", "potential_y", 0.5 * (c.grid2d.y_min + c.grid2d.y_max));
  } else {
    c.potential.center_x = s.number("scenario", "potential_x", 0.5 * (c.grid1d.r_min + c.grid1d.r_max));
  }
}

void parse_klein_values(Settings& s, ScenarioConfig& c) {
  c.values["energy"] = s.number("scenario", "energy", 2.0);
  c.barrier.v0 = s.number("scenario", "v0", 1.0);
  c.barrier.a = s.number("scenario", "a", 0.0);
  c.barrier.b = s.number("scenario", "b", 1.0);
  const double E = c.values["energy"];
  require(E != 0.0, "energy: must be nonzero");
  require(E != c.barrier.v0, "energy: must differ from v0");
  require(c.barrier.a < c.barrier.b, "b: must exceed a");
}

void parse_run1d(Settings& s, ScenarioConfig& c) {
  c.preset = s.choice("scenario", "preset", {"wave", "spin", "klein-steady"}, "wave");
  if (c.preset == "wave") {
    parse_grid1d(s, c, 0.0, 1.0, 256, "periodic");
    c.values["n0"] = s.number("scenario", "n0", 1.0);
    c.values["amplitude"] = s.number("scenario", "amplitude", 0.1);
    c.values["mode"] = s.integer("scenario", "mode", 1);
    require(c.values["mode"] >= 1, "mode: must be a positive integer");
    parse_potential(s, c, false);
  } else if (c.preset == "spin") {
    parse_grid1d(s, c, 0.0, 1.0, 16, "periodic");
    c.values["n0"] = s.number("scenario", "n0", 1.0);
  } else {
    parse_grid1d(s, c, -4.0, 4.0, 512, "outflow");
    parse_klein_values(s, c);
    validated([&] { (void)c.barrier.faces(c.grid1d); });
  }
  c.solver1d.cfl = s.number("solver", "cfl", 0.9);
  c.solver1d.t_end = s.number("solver", "t_end", c.preset == "wave" ? 1.0 : 10.0);
  c.solver1d.splitting =
      s.choice("solver", "splitting", {"strang", "lie"}, "strang") == "strang" ? Splitting::strang
                                                                               : Splitting::lie;
  c.solver1d.rotation = s.choice("solver", "rotation", {"exact_frozen", "rk4"}, "exact_frozen") ==
                                "exact_frozen"
                            ? RotationIntegrator::exact_frozen
                            : RotationIntegrator::rk4;
  c.solver1d.output_stride = s.integer("output", "stride", 0);
  validated([&] { c.solver1d.validate(); });
}

void parse_run2d(Settings& s, ScenarioConfig& c) {
  c.preset = s.choice("scenario", "preset", {"current-wave", "uniform", "gaussian-bump"},
                      "current-wave");
  const bool uniform = c.preset == "uniform";
  c.grid2d.x_min = s.number("grid", "x_min", 0.0);
  c.grid2d.x_max = s.number("grid", "x_max", 1.0);
  c.grid2d.y_min = s.number("grid", "y_min", 0.0);
  c.grid2d.y_max = s.number("grid", "y_max", 1.0);
  c.grid2d.nx = s.integer("grid", "nx", uniform ? 8 : 64);
  c.grid2d.ny = s.integer("grid", "ny", uniform ? 8 : 64);
  validated([&] { c.grid2d.validate(); });

  if (c.preset == "current-wave") {
    c.values["n0"] = s.number("scenario", "n0", 1.0);
    c.values["amplitude"] = s.number("scenario", "amplitude", 0.1);
    c.values["mode"] = s.integer("scenario", "mode", 1);
    require(c.values["mode"] >= 1, "mode: must be a positive integer");
    require(c.grid2d.x_max - c.grid2d.x_min == c.grid2d.y_max - c.grid2d.y_min,
            "y_max: current-wave needs equal x and y extents");
  } else if (uniform) {
    const std::array<double, 4> n{1.0, 0.1, -0.05, 0.08};
    const std::array<Vec2, 4> J{Vec2{0.3, -0.2}, Vec2{0.05, 0.02}, Vec2{-0.03, 0.04},
                                Vec2{0.01, -0.06}};
    for (int k = 0; k < 4; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      c.values[fmt::format("n{}", k)] = s.number("scenario", fmt::format("n{}", k), n[ks]);
      c.values[fmt::format("J{}x", k)] = s.number("scenario", fmt::format("J{}x", k), J[ks][0]);
      c.values[fmt::format("J{}y", k)] = s.number("scenario", fmt::format("J{}y", k), J[ks][1]);
    }
  } else {
    c.values["amplitude"] = s.number("scenario", "amplitude", 0.5);
    c.values["width"] = s.number("scenario", "width", 0.1);
    c.values["polarization"] = s.number("scenario", "polarization", 0.05);
    require(c.values["width"] > 0.0, "width: must be positive");
    parse_potential(s, c, true);
  }
  c.solver2d.cfl = s.number("solver", "cfl", 0.9);
  c.solver2d.t_end = s.number("solver", "t_end", 1.0);
  c.solver2d.output_stride = s.integer("output", "stride", 0);
  validated([&] { c.solver2d.validate(); });
}

void parse_klein(Settings& s, ScenarioConfig& c) {
  parse_grid1d(s, c, -2.0, 3.0, 500, "outflow");
  parse_klein_values(s, c);
}

void parse_equilibrium_check(Settings& s, ScenarioConfig& c) {
  c.values["count"] = s.integer("scenario", "count", 50);
  c.values["seed"] = s.integer("scenario", "seed", 1);
  c.values["order"] = s.integer("scenario", "order", 20);
  c.values["spread"] = s.number("scenario", "spread", 0.3);
  require(c.values["count"] >= 1, "count: must be positive");
  require(c.values["spread"] >= 0.0 && c.values["spread"] < 1.0, "spread: must lie in [0, 1)");
  validated([&] {
    QuadratureSpec q;
    q.order = static_cast<int>(c.values["order"]);
    q.validate();
  });
}

void parse_purestate_check(Settings& s, ScenarioConfig& c) {
  c.preset = s.choice("scenario", "preset", {"gaussian-packet", "plane-wave", "klein"},
                      "gaussian-packet");
  c.grid1d.r_min = s.number("grid", "r_min", -4.0);
  c.grid1d.r_max = s.number("grid", "r_max", 4.0);
  c.grid1d.cells = s.integer("grid", "cells", 128);
  validated([&] { c.grid1d.validate(); });
  if (c.preset == "plane-wave") {
    c.values["wavenumber"] = s.number("scenario", "wavenumber", 1.3);
  } else if (c.preset == "klein") {
    parse_klein_values(s, c);
  }
}

void parse_entropy_eval(Settings& s, ScenarioConfig& c) {
  c.preset = s.choice("scenario", "preset", {"maxwellian", "polarized"}, "maxwellian");
  c.values["n0"] = s.number("scenario", "n0", 1.0);
  c.values["lambda"] = c.preset == "polarized" ? s.number("scenario", "lambda", 0.5) : 0.0;
  c.values["order"] = s.integer("scenario", "order", 20);
  require(c.values["n0"] > 0.0, "n0: must be positive");
  require(c.values["lambda"] >= 0.0 && c.values["lambda"] < 1.0, "lambda: must lie in [0, 1)");
  validated([&] {
    QuadratureSpec q;
    q.order = static_cast<int>(c.values["order"]);
    q.validate();
  });
}

// ---------------------------------------------------------------------------
// Runners

void emit_1d(CsvFile& csv, const Trajectory1D& traj) {
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Field1D& f = traj.snapshots[k];
    for (int i = 0; i < f.grid.cells; ++i) {
      const Cell1D& c = f.cells[static_cast<std::size_t>(i)];
      csv.row({traj.times[k], f.grid.center(i), c.n[0], c.n[1], c.n[2], c.n[3], c.J[0], c.J[1],
               c.J[2], c.J[3]});
    }
  }
}

void run_run1d(const ScenarioConfig& cfg, const Settings& settings, std::ostream& out) {
  const Grid1D& grid = cfg.grid1d;
  const PhysParams& P = cfg.phys;
  Json derived;
  Trajectory1D traj;

  if (cfg.preset == "klein-steady") {
    const KleinState ks = klein_state(cfg.value("energy"), cfg.barrier.v0, cfg.barrier.a,
                                      cfg.barrier.b, P);
    const auto [n, J] = klein_moments(ks, grid.r_min, P);
    const double E = ks.energy();
    const Field1D f0 = piecewise_constant(n[1] * E, n[0] * E, n[0], n[1], cfg.barrier, grid,
                                          cfg.bc, P);
    traj = run_barrier(f0, cfg.barrier, cfg.solver1d, P);
    double drift = 0.0;
    const Field1D& g = traj.snapshots.back();
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
      for (std::size_t s = 0; s < 4; ++s) {
        drift = std::max({drift, std::abs(g.cells[i].n[s] - f0.cells[i].n[s]),
                          std::abs(g.cells[i].J[s] - f0.cells[i].J[s])});
      }
    }
    derived["steady_drift_per_time"] = drift / cfg.solver1d.t_end;
    derived["max_jump_residual"] = traj.max_jump_residual;
  } else {
    Potential1D V = Potential1D::zero(grid);
    if (cfg.potential.kind == "gaussian") {
      const PotentialSpec p = cfg.potential;
      auto v = [p](double r) {
        const double d = (r - p.center_x) / p.width;
        return p.amplitude * std::exp(-d * d);
      };
      V = Potential1D::sample(grid, v, [p, v](double r) {
        return -2.0 * (r - p.center_x) / (p.width * p.width) * v(r);
      });
    }
    Field1D f0;
    if (cfg.preset == "wave") {
      const double n0 = cfg.value("n0"), A = cfg.value("amplitude");
      const double k = kTwoPi * cfg.value("mode") / (grid.r_max - grid.r_min);
      f0 = Field1D::from_function(grid, cfg.bc, [&](double r) {
        const double s = A * std::sin(k * (r - grid.r_min));
        Cell1D c;
        c.n = {n0 + s, s, 0.0, 0.0};
        return c;
      });
      traj = run_smooth(f0, V, cfg.solver1d, P);
      if (cfg.potential.kind == "none" && cfg.bc == BoundaryCondition::periodic) {
        double l1 = 0.0;
        const Field1D& g = traj.snapshots.back();
        for (int i = 0; i < grid.cells; ++i) {
          const double exact =
              n0 + A * std::sin(k * (grid.center(i) - grid.r_min - P.v_F * cfg.solver1d.t_end));
          l1 += std::abs(g.cells[static_cast<std::size_t>(i)].n[0] - exact) * grid.dr();
        }
        derived["l1_error_n0"] = l1;
      }
    } else {
      const double n0 = cfg.value("n0");
      Cell1D c;
      c.n = {n0, 0.0, n0, 0.0};
      f0 = Field1D::uniform(grid, cfg.bc, c);
      traj = run_smooth(f0, V, cfg.solver1d, P);
      const double Omega = P.omega() * std::sqrt(P.m_theta());
      double err = 0.0;
      for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const double t = traj.times[k];
        for (const Cell1D& cell : traj.snapshots[k].cells) {
          err = std::max({err, std::abs(cell.n[2] - n0 * std::cos(Omega * t)),
                          std::abs(cell.J[3] - n0 * std::sqrt(P.m_theta()) * std::sin(Omega * t))});
        }
      }
      derived["rotation_frequency"] = Omega;
      derived["max_rotation_error"] = err;
    }
  }
  derived["dt"] = traj.dt;
  derived["steps"] = traj.steps;
  derived["mass_drift"] = traj.mass_drift;

  CsvFile csv(cfg, settings, "", columns_1d());
  emit_1d(csv, traj);
  write_manifest(cfg, settings, derived, {csv.name()});
  fmt::print(out, "run1d {}: {} steps, dt = {}, mass drift = {}\n", cfg.preset, traj.steps,
             format_number(traj.dt), format_number(traj.mass_drift));
  for (const auto& [key, value] : derived.items()) {
    if (key != "dt" && key != "steps" && key != "mass_drift") {
      fmt::print(out, "  {} = {}\n", key, value.dump());
    }
  }
}

void run_run2d(const ScenarioConfig& cfg, const Settings& settings, std::ostream& out) {
  const Grid2D& grid = cfg.grid2d;
  const PhysParams& P = cfg.phys;
  Potential2D V = Potential2D::zero(grid);
  Field2D f0;
  Json derived;
  std::function<double(const Vec2&, double)> exact_J0x;

  if (cfg.preset == "current-wave") {
    const double c0 = cfg.value("n0"), A = cfg.value("amplitude");
    const double k = kTwoPi * cfg.value("mode") / (grid.x_max - grid.x_min);
    const double e = 1.0 / std::sqrt(2.0);
    exact_J0x = [=](const Vec2& r, double t) {
      return A * std::sin(k * (r[0] - grid.x_min + r[1] - grid.y_min - std::sqrt(2.0) * P.v_F * t));
    };
    f0 = Field2D::from_function(grid, [&](const Vec2& r) {
      const double s = exact_J0x(r, 0.0);
      MomentState u;
      u.n = {c0, 0.0, 0.0, 0.0};
      u.J[0] = {s, s};
      u.J[1] = {e * s, e * s};
      u.J[2] = {e * s, e * s};
      return u;
    });
  } else if (cfg.preset == "uniform") {
    MomentState u;
    for (std::size_t k = 0; k < 4; ++k) {
      u.n[k] = cfg.value(fmt::format("n{}", k));
      u.J[k] = {cfg.value(fmt::format("J{}x", k)), cfg.value(fmt::format("J{}y", k))};
    }
    f0 = Field2D::uniform(grid, u);
  } else {
    const double A = cfg.value("amplitude"), w = cfg.value("width"), p = cfg.value("polarization");
    const Vec2 mid{0.5 * (grid.x_min + grid.x_max), 0.5 * (grid.y_min + grid.y_max)};
    f0 = Field2D::from_function(grid, [&](const Vec2& r) {
      const double dx = r[0] - mid[0], dy = r[1] - mid[1];
      const double n0 = 1.0 + A * std::exp(-(dx * dx + dy * dy) / (w * w));
      MomentState u;
      u.n = {n0, p * n0, p * n0, p * n0};
      return u;
    });
    if (cfg.potential.kind == "gaussian") {
      const PotentialSpec ps = cfg.potential;
      auto v = [ps](const Vec2& r) {
        const double dx = r[0] - ps.center_x, dy = r[1] - ps.center_y;
        return ps.amplitude * std::exp(-(dx * dx + dy * dy) / (ps.width * ps.width));
      };
      V = Potential2D::sample(grid, v, [ps, v](const Vec2& r) {
        const double f = -2.0 / (ps.width * ps.width) * v(r);
        return Vec2{f * (r[0] - ps.center_x), f * (r[1] - ps.center_y)};
      });
    }
  }

  const ConservedTotals before = conserved_totals(f0);
  const Trajectory2D traj = run_2d(f0, V, cfg.solver2d, P);
  const ConservedTotals after = conserved_totals(traj.snapshots.back());
  derived["dt"] = traj.dt;
  derived["steps"] = traj.steps;
  derived["mass_drift"] = traj.mass_drift;
  derived["momentum_change"] = {after.momentum[0] - before.momentum[0],
                                after.momentum[1] - before.momentum[1]};
  derived["mixedness_warnings"] = traj.mixedness_warnings;
  derived["worst_mixedness_margin"] = traj.worst_margin;
  if (exact_J0x) {
    double l1 = 0.0;
    const Field2D& g = traj.snapshots.back();
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        l1 += std::abs(g.at(i, j).J[0][0] - exact_J0x(grid.center(i, j), cfg.solver2d.t_end)) *
              grid.cell_area();
      }
    }
    derived["l1_error_J0x"] = l1;
  }

  CsvFile csv(cfg, settings, "", columns_2d());
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Field2D& f = traj.snapshots[k];
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const MomentState& u = f.at(i, j);
        const Vec2 r = grid.center(i, j);
        csv.row({traj.times[k], r[0], r[1], u.n[0], u.n[1], u.n[2], u.n[3], u.J[0][0], u.J[0][1],
                 u.J[1][0], u.J[1][1], u.J[2][0], u.J[2][1], u.J[3][0], u.J[3][1]});
      }
    }
  }
  write_manifest(cfg, settings, derived, {csv.name()});
  fmt::print(out, "run2d {}: {} steps, dt = {}, mass drift = {}\n", cfg.preset, traj.steps,
             format_number(traj.dt), format_number(traj.mass_drift));
  fmt::print(out, "  mixedness warnings = {}, worst margin = {}\n", traj.mixedness_warnings,
             format_number(traj.worst_margin));
  if (exact_J0x) fmt::print(out, "  l1_error_J0x = {}\n", derived["l1_error_J0x"].dump());
}

void run_klein(const ScenarioConfig& cfg, const Settings& settings, std::ostream& out) {
  const PhysParams& P = cfg.phys;
  const Grid1D& grid = cfg.grid1d;
  const KleinState ks = klein_state(cfg.value("energy"), cfg.barrier.v0, cfg.barrier.a,
                                    cfg.barrier.b, P);
  const std::vector<double> r = grid.centers();
  const SpinorMoments sm = moments_from_spinor(ks.sample(r), P);

  CsvFile csv(cfg, settings, "",
              {"r", "V", "n0", "n1", "n2", "n3", "J0", "J1", "J2", "J3", "spinor_deviation"});
  double deviation = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto [n, J] = klein_moments(ks, r[i], P);
    double dev = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      dev = std::max({dev, std::abs(sm.n[i][s] - n[s]), std::abs(sm.J[i][s] - J[s])});
    }
    deviation = std::max(deviation, dev);
    csv.row({r[i], ks.potential(r[i]), n[0], n[1], n[2], n[3], J[0], J[1], J[2], J[3], dev});
  }

  Json derived;
  derived["k"] = ks.k();
  derived["q"] = ks.q();
  derived["s"] = ks.s();
  derived["s_prime"] = ks.s_prime();
  derived["alpha"] = ks.alpha();
  derived["beta"] = ks.beta();
  derived["t"] = {ks.t().real(), ks.t().imag()};
  derived["T"] = ks.transmission_probability();
  derived["max_spinor_deviation"] = deviation;
  // Jump residual of the equivalent piecewise-constant field, when the
  // barrier edges fall on cell faces.
  try {
    const auto [n, J] = klein_moments(ks, grid.r_min, P);
    const double E = ks.energy();
    const Field1D pc = piecewise_constant(n[1] * E, n[0] * E, n[0], n[1], cfg.barrier, grid,
                                          cfg.bc, P);
    derived["max_jump_residual"] = jump_residual(pc, cfg.barrier, P).max_abs();
  } catch (const std::invalid_argument&) {
    derived["max_jump_residual"] = nullptr;
  }
  write_manifest(cfg, settings, derived, {csv.name()});
  fmt::print(out, "k = {}\nq = {}\ns = {}\ns' = {}\nT = {}\n", format_number(ks.k()),
             format_number(ks.q()), ks.s(), ks.s_prime(),
             format_number(ks.transmission_probability()));
  fmt::print(out, "moment profile: {}\n",
             (std::filesystem::path(cfg.output.dir) / csv.name()).string());
}

void run_equilibrium_check(const ScenarioConfig& cfg, const Settings& settings, std::ostream& out) {
  const PhysParams& P = cfg.phys;
  const int count = static_cast<int>(cfg.value("count"));
  const int order = static_cast<int>(cfg.value("order"));
  const double spread = cfg.value("spread");
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.value("seed")));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);

  std::vector<std::string> cols{"index"};
  for (const char* tag : {"in_", "out_"}) {
    for (int s = 0; s < 4; ++s) cols.push_back(fmt::format("{}n{}", tag, s));
    for (int s = 0; s < 4; ++s) {
      cols.push_back(fmt::format("{}J{}x", tag, s));
      cols.push_back(fmt::format("{}J{}y", tag, s));
    }
  }
  cols.insert(cols.end(), {"max_rel_err", "closure_rel_err", "mixedness_margin"});
  CsvFile csv(cfg, settings, "", cols);

  double worst = 0.0, worst_closure = 0.0, worst_margin = 1.0;
  for (int idx = 0; idx < count; ++idx) {
    MomentState st;
    st.n[0] = pos(rng);
    for (std::size_t s = 1; s < 4; ++s) st.n[s] = spread * st.n[0] * u(rng);
    for (auto& J : st.J) J = {u(rng), u(rng)};
    const MomentTable t = moments_via_quadrature(
        [&](const Vec2& p) { return equilibrium_strongly_mixed(st, P, p); },
        quadrature_for(st, P, order));
    const ClosureTensor L = closure_tensor(st, P);

    double sn = 0.0, sJ = 0.0, sL = 0.0, err = 0.0, cerr = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      sn = std::max(sn, std::abs(st.n[s]));
      sJ = std::max({sJ, std::abs(st.J[s][0]), std::abs(st.J[s][1])});
    }
    for (std::size_t s = 0; s < 4; ++s) {
      err = std::max(err, std::abs(t.n[s] - st.n[s]) / sn);
      for (std::size_t k = 0; k < 2; ++k) err = std::max(err, std::abs(t.J[s][k] - st.J[s][k]) / sJ);
    }
    for (int s = 1; s <= 3; ++s)
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) sL = std::max(sL, std::abs(L(s, i, k)));
    for (int s = 1; s <= 3; ++s) {
      for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) {
          const double q = t.Q2[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]
                               [static_cast<std::size_t>(k)];
          cerr = std::max(cerr, std::abs(q - L(s, i, k)) / sL);
        }
      }
    }
    const double margin = mixedness_check(st, P).margin;
    worst = std::max(worst, err);
    worst_closure = std::max(worst_closure, cerr);
    worst_margin = std::min(worst_margin, margin);

    std::vector<double> row{static_cast<double>(idx)};
    for (std::size_t s = 0; s < 4; ++s) row.push_back(st.n[s]);
    for (std::size_t s = 0; s < 4; ++s) row.insert(row.end(), {st.J[s][0], st.J[s][1]});
    for (std::size_t s = 0; s < 4; ++s) row.push_back(t.n[s]);
    for (std::size_t s = 0; s < 4; ++s) row.insert(row.end(), {t.J[s][0], t.J[s][1]});
    row.insert(row.end(), {err, cerr, margin});
    csv.row(row);
  }

  Json derived;
  derived["states"] = count;
  derived["max_rel_err"] = worst;
  derived["max_closure_rel_err"] = worst_closure;
  derived["min_mixedness_margin"] = worst_margin;
  write_manifest(cfg, settings, derived, {csv.name()});
  fmt::print(out, "{} states, quadrature order {}\n", count, order);
  fmt::print(out, "max relative error (n, J) = {}\n", format_number(worst));
  fmt::print(out, "max relative error (closure) = {}\n", format_number(worst_closure));
}

double max_norm(const std::vector<Vec3>& v) {
  double m = 0.0;
  for (const auto& x : v)
    for (double y : x) m = std::max(m, std::abs(y));
  return m;
}

void run_purestate_check(const ScenarioConfig& cfg, const Settings& settings, std::ostream& out) {
  const PhysParams& P = cfg.phys;
  const Grid1D& g = cfg.grid1d;
  std::optional<KleinState> ks;
  if (cfg.preset == "klein") {
    ks.emplace(cfg.value("energy"), cfg.barrier.v0, cfg.barrier.a, cfg.barrier.b, P);
  }

  CsvFile csv(cfg, settings, "", {"points", "h", "max_residual", "order", "max_saturation_defect"});
  Json levels = Json::array();
  double previous = 0.0, worst_defect = 0.0;
  std::vector<double> orders;
  for (int level = 0; level < 3; ++level) {
    const int points = g.cells << level;
    const std::vector<double> r = linspace(g.r_min, g.r_max, points);
    SpinorField1D psi;
    if (cfg.preset == "gaussian-packet") {
      psi = gaussian_packet(r);
    } else if (cfg.preset == "plane-wave") {
      const double k = cfg.value("wavenumber");
      psi.r = r;
      for (double x : r) {
        const Complex e = std::exp(Complex(0.0, k * x));
        psi.psi1.push_back(e);
        psi.psi2.push_back(e);
        psi.dpsi1.push_back(Complex(0.0, k) * e);
        psi.dpsi2.push_back(Complex(0.0, k) * e);
      }
    } else {
      psi = ks->sample(r);
    }
    const SpinorMoments m = moments_from_spinor(psi, P);
    const double res = max_norm(pure_state_identity_residual(r, m.n, m.J, P));
    double defect = 0.0;
    for (const auto& n : m.n) {
      const double nv = std::sqrt(n[1] * n[1] + n[2] * n[2] + n[3] * n[3]);
      defect = std::max(defect, std::abs(nv - n[0]) / std::max(1.0, n[0]));
    }
    worst_defect = std::max(worst_defect, defect);
    // Orders are meaningless once both residuals sit at roundoff.
    double order = std::nan("");
    if (level > 0 && previous > 1e-12 && res > 0.0) {
      order = std::log2(previous / res);
      orders.push_back(order);
    }
    const double h = r[1] - r[0];
    csv.row({static_cast<double>(points), h, res, order, defect});
    levels.push_back({{"points", points}, {"max_residual", res},
                      {"order", level > 0 && std::isfinite(order) ? Json(order) : Json(nullptr)}});
    fmt::print(out, "points = {:5d}  max residual = {:<24} order = {}\n", points,
               format_number(res), std::isfinite(order) ? format_number(order) : "-");
    previous = res;
  }
  fmt::print(out, "max ||n_vec| - n_0| = {}\n", format_number(worst_defect));

  Json derived;
  derived["levels"] = levels;
  derived["max_saturation_defect"] = worst_defect;
  derived["min_order"] = orders.empty() ? Json(nullptr)
                                        : Json(*std::min_element(orders.begin(), orders.end()));
  write_manifest(cfg, settings, derived, {csv.name()});
}

void run_entropy_eval(const ScenarioConfig& cfg, const Settings& settings, std::ostream& out) {
  const PhysParams& P = cfg.phys;
  const double n0 = cfg.value("n0"), lambda = cfg.value("lambda");
  const double mt = P.m_theta();
  const PhaseSpaceSampler w = [&](std::size_t, const Vec2& p) {
    const double G = std::exp(-(p[0] * p[0] + p[1] * p[1]) / (2.0 * mt)) / (2.0 * std::numbers::pi * mt);
    return PauliComponents{{n0 * G, lambda * n0 * G, 0.0, 0.0}};
  };
  QuadratureSpec quad;
  quad.order = static_cast<int>(cfg.value("order"));
  quad.scale = std::sqrt(mt);
  const std::vector<double> area{1.0};
  const double S = entropy_semiclassical(w, area, P, quad);
  const double exact = n0 * (std::log(n0) - std::log(2.0 * std::numbers::pi * mt) + c_of_lambda(lambda));

  CsvFile csv(cfg, settings, "", {"n0", "lambda", "entropy", "closed_form", "abs_error"});
  csv.row({n0, lambda, S, exact, std::abs(S - exact)});
  Json derived;
  derived["entropy"] = S;
  derived["closed_form"] = exact;
  derived["abs_error"] = std::abs(S - exact);
  write_manifest(cfg, settings, derived, {csv.name()});
  fmt::print(out, "S = {}\nclosed form = {}\n|difference| = {}\n", format_number(S),
             format_number(exact), format_number(std::abs(S - exact)));
}

}  // namespace

double ScenarioConfig::value(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError(key + ": required");
  return it->second;
}

ScenarioConfig parse_scenario(Settings& s, bool phys_required) {
  ScenarioConfig c;
  c.name = s.text("scenario", "name");
  if (std::find(kScenarioNames.begin(), kScenarioNames.end(), c.name) == kScenarioNames.end()) {
    throw ConfigError(fmt::format("name: unknown scenario '{}' (expected one of {})", c.name,
                                  fmt::join(kScenarioNames, ", ")));
  }
  auto phys = [&](const char* key) {
    return phys_required ? s.number("phys", key) : s.number("phys", key, 1.0);
  };
  c.phys.hbar = phys("hbar");
  c.phys.v_F = phys("vF");
  c.phys.m = phys("m");
  c.phys.theta = phys("theta");
  validated([&] { c.phys.validate(); });

  if (c.name == "run1d") {
    parse_run1d(s, c);
  } else if (c.name == "run2d") {
    parse_run2d(s, c);
  } else if (c.name == "klein") {
    parse_klein(s, c);
  } else if (c.name == "equilibrium-check") {
    parse_equilibrium_check(s, c);
  } else if (c.name == "purestate-check") {
    parse_purestate_check(s, c);
  } else {
    parse_entropy_eval(s, c);
  }
  c.output.dir = s.text("output", "dir", ".");
  c.output.prefix = s.text("output", "prefix", c.name);
  require(c.output.prefix.find('/') == std::string::npos, "prefix: must not contain '/'");
  s.reject_unused();
  return c;
}

void run_scenario(const ScenarioConfig& cfg, const Settings& settings, std::ostream& out) {
  if (cfg.name == "run1d") {
    run_run1d(cfg, settings, out);
  } else if (cfg.name == "run2d") {
    run_run2d(cfg, settings, out);
  } else if (cfg.name == "klein") {
    run_klein(cfg, settings, out);
  } else if (cfg.name == "equilibrium-check") {
    run_equilibrium_check(cfg, settings, out);
  } else if (cfg.name == "purestate-check") {
    run_purestate_check(cfg, settings, out);
  } else {
    run_entropy_eval(cfg, settings, out);
  }
}

SpinorField1D gaussian_packet(const std::vector<double>& r) {
  constexpr double k = 1.5, kappa = 0.8, eps = 0.6, shift = 0.5;
  SpinorField1D psi;
  psi.r = r;
  for (double x : r) {
    const Complex a = std::exp(Complex(-0.5 * x * x, k * x));
    const double y = x - shift;
    const Complex b = eps * std::exp(Complex(-0.5 * y * y, kappa * x));
    psi.psi1.push_back(a);
    psi.psi2.push_back(b);
    psi.dpsi1.push_back(Complex(-x, k) * a);
    psi.dpsi2.push_back(Complex(-y, kappa) * b);
  }
  return psi;
}

}  // namespace qfd::cli

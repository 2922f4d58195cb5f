#include <deque>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qfd/common.hpp"
#include "scenarios.hpp"
#include "settings.hpp"

namespace {

using qfd::ConfigError;
using qfd::cli::Settings;

const char* const kUnitsNote =
    "Units: the model is nondimensional. Quantities are measured in a reference\n"
    "system where hbar, vF, m and theta default to 1; a bracketed unit names the\n"
    "dimension of each flag ([length], [time], [energy], [-] for pure numbers).\n"
    "Energies are measured relative to the zero of the potential.\n"
    "\n"
    "Exit codes: 0 success, 2 invalid configuration, 3 model-domain violation,\n"
    "1 internal error.";

/// A flag that overrides one configuration entry when given.
struct Override {
  std::string section;
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::vector<std::string> sets;
  std::deque<Override> overrides;

  void flag(const std::string& name, const std::string& section, const std::string& key,
            const std::string& help) {
    Override& o = overrides.emplace_back();
    o.section = section;
    o.key = key;
    o.option = app->add_option(name, o.value, help);
  }
};

void apply_sets(Settings& s, const std::vector<std::string>& sets) {
  for (const auto& item : sets) {
    const auto dot = item.find('.');
    const auto eq = item.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq || dot == 0 ||
        eq == dot + 1) {
      throw ConfigError(fmt::format("--set: expected section.key=value, got '{}'", item));
    }
    s.set(item.substr(0, dot), item.substr(dot + 1, eq - dot - 1), item.substr(eq + 1));
  }
}

void add_common(Command& c) {
  c.app->add_option("--config", c.config_path, "Read settings from an INI file first")
      ->check(CLI::ExistingFile);
  c.flag("--hbar", "phys", "hbar", "Reduced Planck constant [energy x time]; default 1");
  c.flag("--vF", "phys", "vF", "Fermi speed [length/time]; default 1");
  c.flag("--m", "phys", "m", "Mass parameter of the Maxwellian factor [mass]; default 1");
  c.flag("--theta", "phys", "theta", "Temperature [energy]; default 1");
  c.flag("--out-dir", "output", "dir", "Directory for CSV and manifest files; default .");
  c.flag("--prefix", "output", "prefix", "Output file stem; default the subcommand name");
  c.app->add_option("--set", c.sets, "Override any entry: section.key=value (repeatable)");
}

void add_grid1d(Command& c) {
  c.flag("--r-min", "grid", "r_min", "Left domain edge [length]");
  c.flag("--r-max", "grid", "r_max", "Right domain edge [length]");
  c.flag("--cells", "grid", "cells", "Number of cells, at least 8 [-]");
}

void add_klein(Command& c) {
  c.flag("--energy", "scenario", "energy", "Electron energy E, nonzero and != v0 [energy]; default 2");
  c.flag("--v0", "scenario", "v0", "Barrier height V0 [energy]; default 1");
  c.flag("--a", "scenario", "a", "Left barrier edge [length]; default 0");
  c.flag("--b", "scenario", "b", "Right barrier edge [length]; default 1");
}

void add_potential(Command& c, bool two_d) {
  c.flag("--potential", "scenario", "potential", "Smooth potential: none | gaussian");
  c.flag("--potential-amplitude", "scenario", "potential_amplitude",
         "Gaussian potential height [energy]; default 0.1");
  c.flag("--potential-width", "scenario", "potential_width",
         "Gaussian potential width [length]; default 0.1");
  c.flag("--potential-x", "scenario", "potential_x",
         "Gaussian potential center, x [length]; default domain center");
  if (two_d) {
    c.flag("--potential-y", "scenario", "potential_y",
           "Gaussian potential center, y [length]; default domain center");
  }
}

int run_command(const Command& c, const std::string& name) {
  Settings settings = c.config_path.empty() ? Settings{} : Settings::from_file(c.config_path);
  if (settings.has("scenario", "name")) {
    Settings probe = settings;
    const std::string existing = probe.text("scenario", "name");
    if (existing != name) {
      throw ConfigError(fmt::format("name: config describes '{}', not '{}'", existing, name));
    }
  }
  settings.set("scenario", "name", name);
  apply_sets(settings, c.sets);
  for (const Override& o : c.overrides) {
    if (o.option->count() > 0) settings.set(o.section, o.key, o.value);
  }
  const auto cfg = qfd::cli::parse_scenario(settings, false);
  qfd::cli::run_scenario(cfg, settings, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qfd: quantum fluid dynamics toolkit for graphene electrons", "qfd"};
  app.footer(kUnitsNote);
  app.require_subcommand(1);
  app.set_version_flag("--version", "qfd 1.0");

  std::string run_path;
  std::vector<std::string> run_sets;
  CLI::App* run = app.add_subcommand(
      "run", "Run the scenario described by an INI file ([phys] hbar, vF, m, theta required)");
  run->add_option("config", run_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", run_sets, "Override any entry: section.key=value (repeatable)");

  std::deque<Command> commands;
  auto make = [&](const std::string& name, const std::string& help) -> Command& {
    Command& c = commands.emplace_back();
    c.app = app.add_subcommand(name, help);
    c.app->footer(kUnitsNote);
    add_common(c);
    return c;
  };

  Command& run1d = make("run1d", "Evolve the 1D eight-moment system");
  run1d.flag("--preset", "scenario", "preset", "Initial data: wave | spin | klein-steady");
  add_grid1d(run1d);
  run1d.flag("--bc", "grid", "bc", "Boundary condition: periodic | outflow");
  run1d.flag("--cfl", "solver", "cfl", "CFL number in (0, 1] [-]; default 0.9");
  run1d.flag("--t-end", "solver", "t_end", "Final time [time]");
  run1d.flag("--splitting", "solver", "splitting", "Operator splitting: strang | lie");
  run1d.flag("--rotation", "solver", "rotation", "Spin-block integrator: exact_frozen | rk4");
  run1d.flag("--stride", "output", "stride", "Snapshot every N steps, 0 = first and last [-]");
  run1d.flag("--n0", "scenario", "n0", "Background density [1/length]; default 1");
  run1d.flag("--amplitude", "scenario", "amplitude", "Wave amplitude [1/length]; default 0.1");
  run1d.flag("--mode", "scenario", "mode", "Wave mode number over the domain [-]; default 1");
  add_klein(run1d);
  add_potential(run1d, false);

  Command& run2d = make("run2d", "Evolve the 2D twelve-moment system on a periodic rectangle");
  run2d.flag("--preset", "scenario", "preset", "Initial data: current-wave | uniform | gaussian-bump");
  run2d.flag("--x-min", "grid", "x_min", "Domain edge [length]; default 0");
  run2d.flag("--x-max", "grid", "x_max", "Domain edge [length]; default 1");
  run2d.flag("--y-min", "grid", "y_min", "Domain edge [length]; default 0");
  run2d.flag("--y-max", "grid", "y_max", "Domain edge [length]; default 1");
  run2d.flag("--nx", "grid", "nx", "Cells along x, at least 8 [-]");
  run2d.flag("--ny", "grid", "ny", "Cells along y, at least 8 [-]");
  run2d.flag("--cfl", "solver", "cfl", "CFL number in (0, 1] [-]; default 0.9");
  run2d.flag("--t-end", "solver", "t_end", "Final time [time]; default 1");
  run2d.flag("--stride", "output", "stride", "Snapshot every N steps, 0 = first and last [-]");
  run2d.flag("--n0", "scenario", "n0", "Background density [1/length^2]; default 1");
  run2d.flag("--amplitude", "scenario", "amplitude", "Wave or bump amplitude [1/length^2]");
  run2d.flag("--mode", "scenario", "mode", "Wave mode number [-]; default 1");
  run2d.flag("--width", "scenario", "width", "Bump width [length]; default 0.1");
  run2d.flag("--polarization", "scenario", "polarization",
             "Bump spin polarization per axis, n_j / n_0 [-]; default 0.05");
  add_potential(run2d, true);

  Command& klein = make("klein", "Klein tunneling state through a square barrier");
  add_klein(klein);
  add_grid1d(klein);

  Command& eq = make("equilibrium-check",
                     "Compare quadrature moments of the local equilibrium with the closure");
  eq.flag("--count", "scenario", "count", "Number of random states [-]; default 50");
  eq.flag("--seed", "scenario", "seed", "Random seed [-]; default 1");
  eq.flag("--order", "scenario", "order", "Gauss-Hermite order per axis, even [-]; default 20");
  eq.flag("--spread", "scenario", "spread", "Max |n_j| / n_0 of the random states [-]; default 0.3");

  Command& ps = make("purestate-check", "Pure-state identity residual under grid refinement");
  ps.flag("--preset", "scenario", "preset", "Spinor: gaussian-packet | plane-wave | klein");
  ps.flag("--r-min", "grid", "r_min", "Left edge [length]; default -4");
  ps.flag("--r-max", "grid", "r_max", "Right edge [length]; default 4");
  ps.flag("--cells", "grid", "cells", "Points on the coarsest of three grids [-]; default 128");
  ps.flag("--wavenumber", "scenario", "wavenumber", "Plane-wave wavenumber [1/length]; default 1.3");
  add_klein(ps);

  Command& ent = make("entropy-eval", "Evaluate the semiclassical entropy functional");
  ent.flag("--preset", "scenario", "preset", "Wigner matrix: maxwellian | polarized");
  ent.flag("--n0", "scenario", "n0", "Density [1/length^2]; default 1");
  ent.flag("--lambda", "scenario", "lambda", "Polarization |w_vec| / w_0 in [0, 1) [-]; default 0.5");
  ent.flag("--order", "scenario", "order", "Gauss-Hermite order per axis, even [-]; default 20");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      Settings settings = Settings::from_file(run_path);
      apply_sets(settings, run_sets);
      const auto cfg = qfd::cli::parse_scenario(settings, true);
      qfd::cli::run_scenario(cfg, settings, std::cout);
      return 0;
    }
    for (const Command& c : commands) {
      if (c.app->parsed()) return run_command(c, c.app->get_name());
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const qfd::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

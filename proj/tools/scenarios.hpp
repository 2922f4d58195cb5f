#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qfd/equilibrium.hpp"
#include "qfd/purestate.hpp"
#include "qfd/qfde1d.hpp"
#include "qfd/qfde2d.hpp"
#include "settings.hpp"

namespace qfd::cli {

/// Scenario names accepted by `[scenario] name`; each matches a subcommand.
inline const std::vector<std::string> kScenarioNames{
    "run1d", "run2d", "klein", "equilibrium-check", "purestate-check", "entropy-eval"};

/// Smooth Gaussian potential amplitude * exp(-|r - center|^2 / width^2).
struct PotentialSpec {
  std::string kind = "none";  // none | gaussian
  double amplitude = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double width = 1.0;
};

struct OutputSpec {
  std::string dir = ".";
  std::string prefix;
};

/// Fully validated scenario description. Only the members relevant to
/// `name` are populated; the rest keep their defaults.
struct ScenarioConfig {
  std::string name;
  std::string preset;
  PhysParams phys;
  Grid1D grid1d;
  BoundaryCondition bc = BoundaryCondition::periodic;
  Grid2D grid2d;
  SolverConfig1D solver1d;
  SolverConfig2D solver2d;
  Barrier barrier;
  PotentialSpec potential;
  /// Numeric preset parameters (energy, amplitude, mode, n0, ...).
  std::map<std::string, double> values;
  OutputSpec output;

  double value(const std::string& key) const;
};

/// Reads and validates a scenario. With `phys_required`, every [phys] key
/// must be present; otherwise missing ones default to 1. Throws ConfigError
/// naming the offending field.
ScenarioConfig parse_scenario(Settings& settings, bool phys_required);

/// Runs a parsed scenario, writes <dir>/<prefix>.csv and
/// <dir>/<prefix>.manifest.json, and prints a short summary to `out`.
/// Model-domain violations propagate as DomainError.
void run_scenario(const ScenarioConfig& cfg, const Settings& settings, std::ostream& out);

/// Spin-textured Gaussian packet used by the purestate presets:
///   psi = (exp(-r^2/2 + i k r), eps exp(-(r - shift)^2/2 + i kappa r)).
SpinorField1D gaussian_packet(const std::vector<double>& r);

}  // namespace qfd::cli

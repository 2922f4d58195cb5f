#pragma once

#include <array>
#include <functional>
#include <vector>

#include "qfd/common.hpp"
#include "qfd/purestate.hpp"

namespace qfd {

// One-dimensional 8-moment system: all moments depend on r = r_1 only and
// the second cartesian components vanish. Variables per cell are
// n_0..n_3 and J_0..J_3 (J_s = J_s^1).

enum class BoundaryCondition { periodic, outflow };
enum class Splitting { strang, lie };
enum class RotationIntegrator { exact_frozen, rk4 };

/// Uniform cell-centered grid on [r_min, r_max].
struct Grid1D {
  double r_min = 0.0;
  double r_max = 1.0;
  int cells = 64;

  double dr() const { return (r_max - r_min) / cells; }
  double center(int i) const { return r_min + (i + 0.5) * dr(); }
  /// Face i separates cell i-1 from cell i.
  double face(int i) const { return r_min + i * dr(); }
  std::vector<double> centers() const;
  /// Throws std::invalid_argument unless r_max > r_min and cells >= 8.
  void validate() const;
};

struct Cell1D {
  Moments4 n{};
  Moments4 J{};
};

struct Field1D {
  Grid1D grid;
  BoundaryCondition bc = BoundaryCondition::periodic;
  std::vector<Cell1D> cells;

  static Field1D uniform(const Grid1D& grid, BoundaryCondition bc, const Cell1D& value);
  /// Fills every cell from init(r) evaluated at the cell center.
  static Field1D from_function(const Grid1D& grid, BoundaryCondition bc,
                               const std::function<Cell1D(double)>& init);

  /// Throws DomainError if n_0 <= kDensityFloor in any cell.
  void require_positive_density() const;
};

/// Square barrier V0 on (a, b).
struct Barrier {
  double v0 = 0.0;
  double a = 0.0;
  double b = 1.0;

  double potential(double r) const { return (r > a && r < b) ? v0 : 0.0; }
  /// Face indices of a and b. Throws std::invalid_argument unless both edges
  /// sit on interior cell faces (relative tolerance 1e-9 of dr).
  std::array<int, 2> faces(const Grid1D& grid) const;
};

/// Smooth potential sampled at cell centers, with its derivative.
struct Potential1D {
  std::vector<double> V;
  std::vector<double> dV;

  static Potential1D zero(const Grid1D& grid);
  static Potential1D sample(const Grid1D& grid, const std::function<double(double)>& V,
                            const std::function<double(double)>& dV);
};

struct SolverConfig1D {
  double cfl = 0.9;
  double t_end = 1.0;
  Splitting splitting = Splitting::strang;
  RotationIntegrator rotation = RotationIntegrator::exact_frozen;
  /// Snapshot every `output_stride` steps; 0 keeps only initial and final.
  int output_stride = 0;

  /// Throws std::invalid_argument for cfl outside (0, 1] or t_end <= 0.
  void validate() const;
};

/// Largest admissible step: cfl dr / v_F, further limited so that the
/// fastest local spin-block rate times dt stays <= 0.5 under rk4.
double stable_dt(const Field1D& f, const Potential1D& V, const SolverConfig1D& cfg,
                 const PhysParams& params);

/// Time derivative of every cell: central differences for the transport
/// terms, exact evaluation of the spin-rotation and potential sources.
/// The result stores d/dt(n, J) in a Field1D with the same grid.
Field1D rhs_smooth(const Field1D& f, const Potential1D& V, const PhysParams& params);

/// One split step with a smooth potential. Throws std::invalid_argument if dt
/// exceeds the configured cap and DomainError on a non-positive density.
Field1D step(const Field1D& f, const Potential1D& V, double dt, const SolverConfig1D& cfg,
             const PhysParams& params);

/// One split step in barrier mode: V = 0 inside each subdomain and the jump
/// conditions imposed at the barrier faces.
Field1D step_barrier(const Field1D& f, const Barrier& barrier, double dt,
                     const SolverConfig1D& cfg, const PhysParams& params);

/// Interface residuals at the two barrier edges:
///   [0] v_F [J_1]_a + n_0(a) [V]_a     [1] same at b
///   [2] v_F [J_0]_a + n_1(a) [V]_a     [3] same at b
///   [4] n_2 at the edge where |n_2| is larger
///   [5] n_3 at the edge where |n_3| is larger
/// One-sided limits are the adjacent cell values; n_s(r_0) is their average.
struct JumpResidual {
  std::array<double, 6> values{};
  double max_abs() const;
};

JumpResidual jump_residual(const Field1D& f, const Barrier& barrier, const PhysParams& params);

struct Trajectory1D {
  std::vector<double> times;
  std::vector<Field1D> snapshots;
  double dt = 0.0;
  long steps = 0;
  double mass_drift = 0.0;         ///< |M(t_end) - M(0)| / |M(0)|, M = sum n_0 dr
  double max_jump_residual = 0.0;  ///< barrier mode only
};

Trajectory1D run_smooth(const Field1D& initial, const Potential1D& V, const SolverConfig1D& cfg,
                        const PhysParams& params);

/// Requires the initial field to satisfy the jump conditions to
/// 1e-8 * max(1, v_F max|J|); throws DomainError listing the residuals
/// otherwise.
Trajectory1D run_barrier(const Field1D& initial, const Barrier& barrier,
                         const SolverConfig1D& cfg, const PhysParams& params);

/// Piecewise-constant steady state: n_2 = n_3 = J_2 = J_3 = 0,
/// v_F J_0 + n_1 V = beta0 and v_F J_1 + n_0 V = beta1.
Field1D piecewise_constant(double beta0, double beta1, double n0, double n1,
                           const Barrier& barrier, const Grid1D& grid, BoundaryCondition bc,
                           const PhysParams& params);

/// <H> = v_F J_1 / n_0 + theta / 2 + V.
double energy_density(double n0, double J1, double V, const PhysParams& params);

/// Discrete residual of the eight 1D equations between two time levels,
/// centered in time and space. Cells at the domain ends and cells adjacent
/// to barrier faces (when `barrier` is given) are not evaluated.
struct PdeResidual1D {
  std::vector<std::array<double, 8>> cells;
  std::vector<char> evaluated;
  double max_abs = 0.0;
};

PdeResidual1D pde_residual(const Field1D& before, const Field1D& after, double dt,
                           const Potential1D& V, const PhysParams& params,
                           const Barrier* barrier = nullptr);

/// sum n_0 dr with pairwise summation.
double total_mass(const Field1D& f);

/// (m theta - u_0^2)(n_2^2 + n_3^2) + J_2^2 + J_3^2, conserved by the
/// frozen-coefficient spin rotation when V' = 0.
double spin_block_invariant(const Cell1D& cell, const PhysParams& params);

}  // namespace qfd

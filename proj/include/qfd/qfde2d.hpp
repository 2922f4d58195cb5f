#pragma once

#include <functional>
#include <vector>

#include "qfd/common.hpp"
#include "qfd/equilibrium.hpp"

namespace qfd {

/// Periodic rectangle [x_min, x_max) x [y_min, y_max) with nx x ny cells.
struct Grid2D {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  int nx = 16, ny = 16;

  double dx() const { return (x_max - x_min) / nx; }
  double dy() const { return (y_max - y_min) / ny; }
  double cell_area() const { return dx() * dy(); }
  Vec2 center(int i, int j) const {
    return {x_min + (i + 0.5) * dx(), y_min + (j + 0.5) * dy()};
  }
  /// Throws std::invalid_argument unless both extents are positive and
  /// nx, ny >= 8.
  void validate() const;
};

/// Cells are stored row-major: index = j * nx + i.
struct Field2D {
  Grid2D grid;
  std::vector<MomentState> cells;

  MomentState& at(int i, int j) { return cells[index(i, j)]; }
  const MomentState& at(int i, int j) const { return cells[index(i, j)]; }
  /// Periodic wrap of (i, j).
  std::size_t index(int i, int j) const;

  static Field2D uniform(const Grid2D& grid, const MomentState& value);
  static Field2D from_function(const Grid2D& grid,
                               const std::function<MomentState(const Vec2&)>& init);

  /// Throws DomainError if n_0 <= kDensityFloor in any cell.
  void require_positive_density() const;
};

/// Smooth potential gradient at cell centers (same layout as Field2D).
struct Potential2D {
  std::vector<double> V;
  std::vector<Vec2> grad;

  static Potential2D zero(const Grid2D& grid);
  static Potential2D sample(const Grid2D& grid, const std::function<double(const Vec2&)>& V,
                            const std::function<Vec2(const Vec2&)>& grad);
};

struct SolverConfig2D {
  double cfl = 0.9;
  double t_end = 1.0;
  int output_stride = 0;

  void validate() const;
};

/// Time derivative of the 12 moments, central differences in space.
/// The result stores d/dt(n, J) per cell.
Field2D rhs_2d(const Field2D& f, const Potential2D& V, const PhysParams& params);

/// Right-hand side of the spatially homogeneous system:
///   dn_0/dt = 0,  dn_s/dt = (2 v_F/hbar) eta_{skj} J_j^k,
///   dJ_0/dt = 0,  dJ_s^i/dt = (2 v_F/hbar) eta_{skj} L_j^{ik}.
MomentState uniform_ode_rhs(const MomentState& u, const PhysParams& params);

/// min(cfl min(dx,dy) / (2 v_F), 0.5 / local rate) where the local rate
/// bounds the spin-rotation frequencies of every cell.
double stable_dt_2d(const Field2D& f, const Potential2D& V, const SolverConfig2D& cfg,
                    const PhysParams& params);

/// Strang step: half RK4 step of the cell-local sources, flux-form upwind
/// transport, half RK4 step. Throws std::invalid_argument if dt exceeds
/// the cap and DomainError on a non-positive density.
Field2D step_2d(const Field2D& f, const Potential2D& V, double dt, const SolverConfig2D& cfg,
                const PhysParams& params);

struct ConservedTotals {
  double mass = 0.0;
  Vec2 momentum{0.0, 0.0};
};

/// Cell sums of n_0 and J_0 times the cell area (pairwise summation).
ConservedTotals conserved_totals(const Field2D& f);

struct Trajectory2D {
  std::vector<double> times;
  std::vector<Field2D> snapshots;
  double dt = 0.0;
  long steps = 0;
  double mass_drift = 0.0;
  /// Cell-steps where |n_vec|^2/n_0^2 exceeded the strongly-mixed bound.
  long mixedness_warnings = 0;
  double worst_margin = 1.0;
};

Trajectory2D run_2d(const Field2D& initial, const Potential2D& V, const SolverConfig2D& cfg,
                    const PhysParams& params);

}  // namespace qfd

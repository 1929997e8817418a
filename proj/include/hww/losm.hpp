#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hww/grid.hpp"
#include "hww/material.hpp"
#include "hww/mesh.hpp"
#include "hww/time_grid.hpp"

namespace hww {

/// One time layer of the low-order second-moment solution: cell-average
/// scalar flux with boundary point values (length I+2) and cell-edge
/// currents (length I+1), plus the incoming partial currents.
struct LOSMState {
  GridFunction phi;      // cell_with_boundary
  GridFunction current;  // edge
  double incoming_left = 0.0;   // J_L
  double incoming_right = 0.0;  // J_R

  static LOSMState zero(int cells) {
    return {GridFunction::cell_with_boundary(cells),
            GridFunction::edge(cells), 0.0, 0.0};
  }
};

/// Closures feeding one solve. F grids are cell averages with boundary point
/// values (length I+2). In lagged mode the previous-layer closures stand in
/// for the current-layer ones throughout the system (the semi-implicit
/// start-of-step solve); in implicit mode the current-layer closures come
/// from mid-step Monte Carlo snapshots.
struct ClosureInput {
  bool implicit_closures = false;
  GridFunction F_now;  // ignored when lagged
  double PL_now = 0.0;
  double PR_now = 0.0;
  GridFunction F_prev;
  double PL_prev = 0.0;
  double PR_prev = 0.0;

  static ClosureInput lagged(GridFunction F_prev, double PL_prev, double PR_prev) {
    ClosureInput c;
    c.F_prev = std::move(F_prev);
    c.PL_prev = PL_prev;
    c.PR_prev = PR_prev;
    return c;
  }

  static ClosureInput implicit(GridFunction F_now, double PL_now, double PR_now,
                               GridFunction F_prev, double PL_prev, double PR_prev) {
    ClosureInput c;
    c.implicit_closures = true;
    c.F_now = std::move(F_now);
    c.PL_now = PL_now;
    c.PR_now = PR_now;
    c.F_prev = std::move(F_prev);
    c.PL_prev = PL_prev;
    c.PR_prev = PR_prev;
    return c;
  }
};

/// Cell-edge currents from cell-average census currents: linear
/// interpolation between adjacent cell midpoints at interior edges,
/// constant extrapolation at the boundary edges.
GridFunction edge_currents_from_census(const std::vector<double>& census_current,
                                       const Mesh1D& mesh);

/// Assemble and solve the theta-weighted finite-volume moment system for one
/// step: balance over cells, first moment over half cells, Marshak-type
/// boundary rows. Unknowns are interleaved (phi_0, J_0, phi_1, ..., phi_I+1)
/// making the matrix tridiagonal; solved by direct banded elimination with
/// partial pivoting. `q` holds cell-integrated sources (length I).
/// Throws std::runtime_error naming the pivot on a singular system.
LOSMState assemble_solve(const LOSMState& prev, const ClosureInput& closures,
                         double theta, double dt,
                         std::span<const Material> materials, const Mesh1D& mesh,
                         const GridFunction& q);

/// Repeated assemble_solve, each output feeding the next step.
std::vector<LOSMState> march(const LOSMState& initial,
                             std::span<const ClosureInput> closures,
                             const TimeGrid& tgrid, double theta,
                             std::span<const Material> materials,
                             const Mesh1D& mesh, const GridFunction& q);

/// Residual of every discrete equation for a candidate solution, scaled by
/// the largest term in that equation. The exactness suites pin these at
/// 1e-12.
std::vector<double> equation_residuals(const LOSMState& prev,
                                       const ClosureInput& closures, double theta,
                                       double dt, std::span<const Material> materials,
                                       const Mesh1D& mesh, const GridFunction& q,
                                       const LOSMState& solution);

/// Plain-text triplet dump (row, col, value) of the assembled matrix plus
/// the right-hand side, for debugging.
void dump_system(const LOSMState& prev, const ClosureInput& closures, double theta,
                 double dt, std::span<const Material> materials, const Mesh1D& mesh,
                 const GridFunction& q, std::ostream& out);

}  // namespace hww

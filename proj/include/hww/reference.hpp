#pragma once

#include <span>
#include <string>
#include <vector>

#include "hww/config.hpp"
#include "hww/material.hpp"
#include "hww/mesh.hpp"
#include "hww/time_grid.hpp"

namespace hww {

/// Symmetric Gauss-Legendre quadrature on [-1,1].
struct GaussLegendre {
  std::vector<double> mu;
  std::vector<double> weight;

  static GaussLegendre order(int n);
};

/// Time-dependent discrete-ordinates problem on a fine grid: per-cell
/// materials, initial cell-average angular flux psi0 [direction][cell],
/// incoming boundary angular fluxes per direction (constant in time), and an
/// isotropic source density q per cell (constant in time).
struct SnProblem {
  Mesh1D mesh;
  std::vector<Material> materials;
  TimeGrid tgrid;
  std::vector<double> psi0;       // order * cells, [k*cells + i]
  std::vector<double> inc_left;   // order (used for mu > 0)
  std::vector<double> inc_right;  // order (used for mu < 0)
  std::vector<double> q;          // cells, isotropic source density
};

struct SnConfig {
  int quadrature_order = 16;
  double tolerance = 1e-9;
  int max_iterations = 1000;
};

/// Angular moments of one layer, including edge currents and boundary point
/// values needed to close the low-order system.
struct SnMoments {
  std::vector<double> phi;           // cells
  std::vector<double> current_cell;  // cells
  std::vector<double> closure;       // cells, (1/3 - mu^2) moment
  std::vector<double> current_edge;  // cells + 1
  double phi_left = 0.0, phi_right = 0.0;
  double closure_left = 0.0, closure_right = 0.0;
  double p_left = 0.0, p_right = 0.0;  // (1/2 - |mu|) boundary moments
};

struct SnSolution {
  Mesh1D mesh;
  TimeGrid tgrid;
  GaussLegendre quadrature;
  std::vector<SnMoments> layers;   // size steps + 1, layer 0 = initial
  std::vector<int> iterations;     // source iterations per step
};

/// Diamond-difference spatial sweep per direction, backward Euler in time,
/// source iteration over the isotropic scatter+fission source. Throws on
/// non-convergence, reporting the achieved residual.
SnSolution sn_solve(const SnProblem& problem, const SnConfig& config);

/// Angular moments {phi, J, F} of a cell-average angular flux array
/// [direction][cell] under the given quadrature.
struct MomentSet {
  std::vector<double> phi, current, closure;
};
MomentSet moments(std::span<const double> psi, const GaussLegendre& quad, int cells);

/// Reference flux projected onto the tally grids: layer values phi_ref^n and
/// interval averages <phi_ref>^n per Monte Carlo step.
struct ReferenceSolution {
  Mesh1D mesh;      // tally mesh
  TimeGrid tgrid;   // Monte Carlo time grid
  std::vector<std::vector<double>> phi_layer;     // [0..N][cells]
  std::vector<std::vector<double>> phi_interval;  // [0..N-1] for steps 1..N

  std::span<const double> layer(int n) const { return phi_layer[n]; }
  std::span<const double> interval_avg(int step) const {
    return phi_interval[step - 1];
  }
};

/// Conservative projection (width-weighted in space, trapezoid in time) of a
/// fine solution onto the tally mesh and Monte Carlo time grid. The fine
/// grids must nest the tally grids.
ReferenceSolution project(const SnSolution& fine, const Mesh1D& tally_mesh,
                          const TimeGrid& tally_tgrid);

/// Fine-grid pulse problem matching a run configuration: the tally mesh
/// refined space_refine times per cell, time_refine layers per Monte Carlo
/// step, and the delta impulse loaded isotropically into the fine cell
/// containing the source (split across the two adjacent cells when the
/// source sits on an edge), with total strength config.source.strength.
SnProblem pulse_problem(const RunConfig& config, int space_refine, int time_refine);

/// Compute the reference for a run configuration with the default oracle
/// resolution (5x space, 20x time, S16).
ReferenceSolution compute_reference(const RunConfig& config, int space_refine = 5,
                                    int time_refine = 20, int sn_order = 16);

/// Plain-text reference file, one row per (layer, cell):
///   t_layer, cell_index, x_center, phi_layer, phi_interval_avg
/// Layer 0 has no interval average and stores nan.
void save_reference(const ReferenceSolution& ref, const std::string& path);

/// Parse and shape-validate a reference file against the given grids.
ReferenceSolution load_reference(const std::string& path, const Mesh1D& mesh,
                                 const TimeGrid& tgrid);

}  // namespace hww

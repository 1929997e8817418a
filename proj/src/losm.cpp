#include "hww/losm.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hww/banded.hpp"

namespace hww {

GridFunction edge_currents_from_census(const std::vector<double>& census_current,
                                       const Mesh1D& mesh) {
  const int cells = mesh.cells();
  if (static_cast<int>(census_current.size()) != cells)
    throw std::invalid_argument("census current must have one value per cell");
  if (cells < 2)
    throw std::invalid_argument("edge interpolation needs at least two cells");

  GridFunction edges = GridFunction::edge(cells);
  edges[0] = census_current.front();
  edges[cells] = census_current.back();
  for (int e = 1; e < cells; ++e) {
    // Linear interpolation between the midpoints of the adjacent cells,
    // evaluated at the shared edge.
    const double xl = mesh.center(e - 1);
    const double xr = mesh.center(e);
    const double t = (mesh.edge(e) - xl) / (xr - xl);
    edges[e] = (1.0 - t) * census_current[e - 1] + t * census_current[e];
  }
  return edges;
}

namespace {

// Shared assembly of the interleaved tridiagonal system
// (phi_0, J_0, phi_1, J_1, ..., J_I, phi_I+1).
struct Assembly {
  TridiagonalSystem system;
  explicit Assembly(int n) : system(n) {}
};

void check_inputs(const LOSMState& prev, const ClosureInput& closures,
                  double theta, double dt, std::span<const Material> materials,
                  const Mesh1D& mesh, const GridFunction& q) {
  const std::size_t cells = static_cast<std::size_t>(mesh.cells());
  if (!(theta >= 0.5 && theta <= 1.0))
    throw std::invalid_argument("theta must lie in [1/2, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (materials.size() != cells)
    throw std::invalid_argument("materials must have one entry per cell");
  if (prev.phi.values.size() != cells + 2 || prev.current.values.size() != cells + 1)
    throw std::invalid_argument("previous state shape mismatch");
  if (closures.F_prev.values.size() != cells + 2)
    throw std::invalid_argument("closure shape mismatch");
  if (closures.implicit_closures && closures.F_now.values.size() != cells + 2)
    throw std::invalid_argument("implicit closure shape mismatch");
  if (q.values.size() != cells)
    throw std::invalid_argument("source must have one value per cell");
  for (double v : prev.phi.values)
    if (!std::isfinite(v)) throw std::invalid_argument("NaN in previous flux");
  for (double v : prev.current.values)
    if (!std::isfinite(v)) throw std::invalid_argument("NaN in previous current");
  for (double v : closures.F_prev.values)
    if (!std::isfinite(v)) throw std::invalid_argument("NaN in closures");
}

Assembly assemble(const LOSMState& prev, const ClosureInput& closures,
                  double theta, double dt, std::span<const Material> materials,
                  const Mesh1D& mesh, const GridFunction& q) {
  const int cells = mesh.cells();
  const int n = 2 * cells + 3;
  Assembly asmbl(n);
  auto& sys = asmbl.system;

  const GridFunction& F_star = closures.implicit_closures ? closures.F_now : closures.F_prev;
  const double PL_star = closures.implicit_closures ? closures.PL_now : closures.PL_prev;
  const double PR_star = closures.implicit_closures ? closures.PR_now : closures.PR_prev;
  const GridFunction& F_prev = closures.F_prev;
  const GridFunction& phi_prev = prev.phi;
  const GridFunction& J_prev = prev.current;

  // sigma_t of cell i in 1..I (ghost-width cells never contribute).
  auto sigt = [&](int i) { return materials[i - 1].sigma_t; };
  auto removal = [&](int i) { return materials[i - 1].removal(); };
  auto speed = [&](int i) { return materials[i - 1].speed; };

  // Left boundary row: J_0 + phi_0/2 = 2 J_L + P_L.
  sys.diag[0] = 0.5;
  sys.upper[0] = 1.0;
  sys.rhs[0] = 2.0 * prev.incoming_left + PL_star;

  // Balance over cell i = 1..I (row 2i).
  for (int i = 1; i <= cells; ++i) {
    const int m = 2 * i;
    const double dx = mesh.ghost_width(i);
    const double tau = dx / (speed(i) * dt);
    sys.lower[m] = -theta;
    sys.diag[m] = tau + theta * removal(i) * dx;
    sys.upper[m] = theta;
    sys.rhs[m] = tau * phi_prev[i] + theta * q[i - 1] +
                 (theta - 1.0) * (J_prev[i] - J_prev[i - 1] +
                                  removal(i) * dx * phi_prev[i] - q[i - 1]);
  }

  // First moment over the half cells around edge i = 0..I (row 2i+1).
  for (int i = 0; i <= cells; ++i) {
    const int m = 2 * i + 1;
    const double dx_l = mesh.ghost_width(i);      // cell i
    const double dx_r = mesh.ghost_width(i + 1);  // cell i+1
    const double dx_hat = 0.5 * (dx_r + dx_l);
    // Width-weighted edge averages; a ghost width of zero drops its cell.
    double sig_hat = 0.0;
    double inv_speed_hat = 0.0;
    {
      double num_sig = 0.0, num_vel = 0.0;
      if (dx_l > 0.0) { num_sig += sigt(i) * dx_l; num_vel += dx_l / speed(i); }
      if (dx_r > 0.0) { num_sig += sigt(i + 1) * dx_r; num_vel += dx_r / speed(i + 1); }
      sig_hat = num_sig / (dx_l + dx_r);
      inv_speed_hat = num_vel / (dx_l + dx_r);
    }
    const double tau = dx_hat * inv_speed_hat / dt;
    sys.lower[m] = -theta / 3.0;
    sys.diag[m] = tau + theta * sig_hat * dx_hat;
    sys.upper[m] = theta / 3.0;
    sys.rhs[m] = tau * J_prev[i] + theta * (F_star[i + 1] - F_star[i]) +
                 (theta - 1.0) * ((phi_prev[i + 1] - phi_prev[i]) / 3.0 +
                                  sig_hat * dx_hat * J_prev[i] -
                                  (F_prev[i + 1] - F_prev[i]));
  }

  // Right boundary row: J_I - phi_I+1/2 = 2 J_R - P_R.
  const int m = 2 * cells + 2;
  sys.lower[m] = 1.0;
  sys.diag[m] = -0.5;
  sys.rhs[m] = 2.0 * prev.incoming_right - PR_star;

  return asmbl;
}

}  // namespace

LOSMState assemble_solve(const LOSMState& prev, const ClosureInput& closures,
                         double theta, double dt,
                         std::span<const Material> materials, const Mesh1D& mesh,
                         const GridFunction& q) {
  check_inputs(prev, closures, theta, dt, materials, mesh, q);
  Assembly asmbl = assemble(prev, closures, theta, dt, materials, mesh, q);

  std::vector<double> u;
  try {
    u = solve_tridiagonal_pivoted(std::move(asmbl.system));
  } catch (const SingularSystemError& e) {
    throw std::runtime_error("singular low-order system at pivot row " +
                             std::to_string(e.row));
  }

  const int cells = mesh.cells();
  LOSMState out = LOSMState::zero(cells);
  out.incoming_left = prev.incoming_left;
  out.incoming_right = prev.incoming_right;
  for (int i = 0; i <= cells + 1; ++i) out.phi[i] = u[2 * i];
  for (int i = 0; i <= cells; ++i) out.current[i] = u[2 * i + 1];
  return out;
}

std::vector<LOSMState> march(const LOSMState& initial,
                             std::span<const ClosureInput> closures,
                             const TimeGrid& tgrid, double theta,
                             std::span<const Material> materials,
                             const Mesh1D& mesh, const GridFunction& q) {
  if (static_cast<int>(closures.size()) != tgrid.steps())
    throw std::invalid_argument("need one closure set per time step");
  std::vector<LOSMState> states;
  states.reserve(closures.size());
  const LOSMState* prev = &initial;
  for (int n = 1; n <= tgrid.steps(); ++n) {
    states.push_back(
        assemble_solve(*prev, closures[n - 1], theta, tgrid.dt(n), materials, mesh, q));
    prev = &states.back();
  }
  return states;
}

std::vector<double> equation_residuals(const LOSMState& prev,
                                       const ClosureInput& closures, double theta,
                                       double dt, std::span<const Material> materials,
                                       const Mesh1D& mesh, const GridFunction& q,
                                       const LOSMState& solution) {
  check_inputs(prev, closures, theta, dt, materials, mesh, q);
  Assembly asmbl = assemble(prev, closures, theta, dt, materials, mesh, q);
  const auto& sys = asmbl.system;
  const int cells = mesh.cells();
  const int n = sys.size();

  std::vector<double> u(n);
  for (int i = 0; i <= cells + 1; ++i) u[2 * i] = solution.phi[i];
  for (int i = 0; i <= cells; ++i) u[2 * i + 1] = solution.current[i];

  std::vector<double> residuals(n, 0.0);
  for (int m = 0; m < n; ++m) {
    double lhs = sys.diag[m] * u[m];
    double scale = std::abs(sys.diag[m] * u[m]);
    if (m > 0) {
      lhs += sys.lower[m] * u[m - 1];
      scale = std::max(scale, std::abs(sys.lower[m] * u[m - 1]));
    }
    if (m + 1 < n) {
      lhs += sys.upper[m] * u[m + 1];
      scale = std::max(scale, std::abs(sys.upper[m] * u[m + 1]));
    }
    scale = std::max(scale, std::abs(sys.rhs[m]));
    const double res = std::abs(lhs - sys.rhs[m]);
    residuals[m] = scale > 0.0 ? res / scale : res;
  }
  return residuals;
}

void dump_system(const LOSMState& prev, const ClosureInput& closures, double theta,
                 double dt, std::span<const Material> materials, const Mesh1D& mesh,
                 const GridFunction& q, std::ostream& out) {
  check_inputs(prev, closures, theta, dt, materials, mesh, q);
  Assembly asmbl = assemble(prev, closures, theta, dt, materials, mesh, q);
  const auto& sys = asmbl.system;
  out << "# row col value\n";
  for (int m = 0; m < sys.size(); ++m) {
    if (m > 0 && sys.lower[m] != 0.0) out << m << ' ' << m - 1 << ' ' << sys.lower[m] << '\n';
    out << m << ' ' << m << ' ' << sys.diag[m] << '\n';
    if (m + 1 < sys.size() && sys.upper[m] != 0.0)
      out << m << ' ' << m + 1 << ' ' << sys.upper[m] << '\n';
  }
  out << "# rhs\n";
  for (int m = 0; m < sys.size(); ++m) out << m << ' ' << sys.rhs[m] << '\n';
}

}  // namespace hww

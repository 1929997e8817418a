#include "hww/reference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hww/losm.hpp"

namespace hww {

GaussLegendre GaussLegendre::order(int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("quadrature order must be even and >= 2");
  GaussLegendre q;
  q.mu.resize(n);
  q.weight.resize(n);
  for (int i = 0; i < n / 2; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.mu[i] = -x;
    q.mu[n - 1 - i] = x;
    q.weight[i] = w;
    q.weight[n - 1 - i] = w;
  }
  return q;
}

MomentSet moments(std::span<const double> psi, const GaussLegendre& quad, int cells) {
  const int order = static_cast<int>(quad.mu.size());
  if (psi.size() != static_cast<std::size_t>(order) * cells)
    throw std::invalid_argument("angular flux size does not match quadrature");
  MomentSet m;
  m.phi.assign(cells, 0.0);
  m.current.assign(cells, 0.0);
  m.closure.assign(cells, 0.0);
  for (int k = 0; k < order; ++k) {
    const double mu = quad.mu[k];
    const double w = quad.weight[k];
    const double wf = w * (1.0 / 3.0 - mu * mu);
    const double wj = w * mu;
    const double* row = psi.data() + static_cast<std::size_t>(k) * cells;
    for (int i = 0; i < cells; ++i) {
      m.phi[i] += w * row[i];
      m.current[i] += wj * row[i];
      m.closure[i] += wf * row[i];
    }
  }
  return m;
}

namespace {

// Moments of one layer from the converged scalar flux: a final sweep per
// direction that also collects edge values.
SnMoments moment_sweep(const SnProblem& prob, const GaussLegendre& quad,
                       std::span<const double> phi, std::span<const double> psi_prev,
                       double dt, std::span<double> psi_out_cells) {
  const Mesh1D& mesh = prob.mesh;
  const int cells = mesh.cells();
  const int order = static_cast<int>(quad.mu.size());

  SnMoments m;
  m.phi.assign(cells, 0.0);
  m.current_cell.assign(cells, 0.0);
  m.closure.assign(cells, 0.0);
  m.current_edge.assign(cells + 1, 0.0);

  for (int k = 0; k < order; ++k) {
    const double mu = quad.mu[k];
    const double w = quad.weight[k];
    const double abs_mu = std::abs(mu);
    double* cell_row = psi_out_cells.data() + static_cast<std::size_t>(k) * cells;
    const double* prev_row = psi_prev.data() + static_cast<std::size_t>(k) * cells;

    auto edge_score = [&](int e, double psi_edge) {
      m.current_edge[e] += w * mu * psi_edge;
      if (e == 0) {
        m.phi_left += w * psi_edge;
        m.closure_left += w * (1.0 / 3.0 - mu * mu) * psi_edge;
        m.p_left += w * (0.5 - abs_mu) * psi_edge;
      } else if (e == cells) {
        m.phi_right += w * psi_edge;
        m.closure_right += w * (1.0 / 3.0 - mu * mu) * psi_edge;
        m.p_right += w * (0.5 - abs_mu) * psi_edge;
      }
    };

    if (mu > 0.0) {
      double psi_in = prob.inc_left[k];
      edge_score(0, psi_in);
      for (int i = 0; i < cells; ++i) {
        const Material& mat = prob.materials[i];
        const double dx = mesh.width(i);
        const double tau = 1.0 / (mat.speed * dt);
        const double sig_eff = mat.sigma_t + tau;
        const double src = 0.5 * ((mat.sigma_s + mat.nu_f * mat.sigma_f) * phi[i] +
                                  prob.q[i]) +
                           tau * prev_row[i];
        const double psi_next =
            (src * dx + (mu - 0.5 * sig_eff * dx) * psi_in) / (mu + 0.5 * sig_eff * dx);
        cell_row[i] = 0.5 * (psi_in + psi_next);
        psi_in = psi_next;
        edge_score(i + 1, psi_in);
      }
    } else {
      double psi_in = prob.inc_right[k];
      edge_score(cells, psi_in);
      for (int i = cells - 1; i >= 0; --i) {
        const Material& mat = prob.materials[i];
        const double dx = mesh.width(i);
        const double tau = 1.0 / (mat.speed * dt);
        const double sig_eff = mat.sigma_t + tau;
        const double src = 0.5 * ((mat.sigma_s + mat.nu_f * mat.sigma_f) * phi[i] +
                                  prob.q[i]) +
                           tau * prev_row[i];
        const double psi_next =
            (src * dx + (abs_mu - 0.5 * sig_eff * dx) * psi_in) /
            (abs_mu + 0.5 * sig_eff * dx);
        cell_row[i] = 0.5 * (psi_in + psi_next);
        psi_in = psi_next;
        edge_score(i, psi_in);
      }
    }

    const double wf = w * (1.0 / 3.0 - mu * mu);
    for (int i = 0; i < cells; ++i) {
      m.phi[i] += w * cell_row[i];
      m.current_cell[i] += w * mu * cell_row[i];
      m.closure[i] += wf * cell_row[i];
    }
  }
  return m;
}

}  // namespace

SnSolution sn_solve(const SnProblem& prob, const SnConfig& config) {
  const int cells = prob.mesh.cells();
  const GaussLegendre quad = GaussLegendre::order(config.quadrature_order);
  const int order = config.quadrature_order;
  if (prob.psi0.size() != static_cast<std::size_t>(order) * cells)
    throw std::invalid_argument("psi0 size does not match quadrature order and mesh");
  if (prob.inc_left.size() != static_cast<std::size_t>(order) ||
      prob.inc_right.size() != static_cast<std::size_t>(order))
    throw std::invalid_argument("incoming flux arrays must match quadrature order");
  if (prob.materials.size() != static_cast<std::size_t>(cells) ||
      prob.q.size() != static_cast<std::size_t>(cells))
    throw std::invalid_argument("materials and source must have one entry per cell");

  SnSolution sol;
  sol.mesh = prob.mesh;
  sol.tgrid = prob.tgrid;
  sol.quadrature = quad;
  sol.layers.reserve(prob.tgrid.steps() + 1);
  sol.iterations.reserve(prob.tgrid.steps() + 1);

  // Layer 0 from the initial condition; edge currents interpolated.
  {
    const MomentSet m0 = moments(prob.psi0, quad, cells);
    SnMoments layer0;
    layer0.phi = m0.phi;
    layer0.current_cell = m0.current;
    layer0.closure = m0.closure;
    layer0.current_edge =
        cells >= 2 ? edge_currents_from_census(m0.current, prob.mesh).values
                   : std::vector<double>(cells + 1, m0.current[0]);
    layer0.phi_left = m0.phi.front();
    layer0.phi_right = m0.phi.back();
    layer0.closure_left = m0.closure.front();
    layer0.closure_right = m0.closure.back();
    sol.layers.push_back(std::move(layer0));
    sol.iterations.push_back(0);
  }

  std::vector<double> psi_prev = prob.psi0;
  std::vector<double> psi_work(psi_prev.size());
  std::vector<double> phi = sol.layers[0].phi;
  std::vector<double> phi_new(cells);

  for (int n = 1; n <= prob.tgrid.steps(); ++n) {
    const double dt = prob.tgrid.dt(n);
    int iters = 0;
    double residual = 0.0;
    for (; iters < config.max_iterations; ++iters) {
      moment_sweep(prob, quad, phi, psi_prev, dt, psi_work);
      // Recompute phi from the swept angular flux.
      std::fill(phi_new.begin(), phi_new.end(), 0.0);
      for (int k = 0; k < order; ++k) {
        const double w = quad.weight[k];
        const double* row = psi_work.data() + static_cast<std::size_t>(k) * cells;
        for (int i = 0; i < cells; ++i) phi_new[i] += w * row[i];
      }
      double diff = 0.0, scale = 0.0;
      for (int i = 0; i < cells; ++i) {
        diff = std::max(diff, std::abs(phi_new[i] - phi[i]));
        scale = std::max(scale, std::abs(phi_new[i]));
      }
      phi = phi_new;
      residual = scale > 0.0 ? diff / scale : diff;
      if (residual <= config.tolerance) break;
    }
    if (residual > config.tolerance) {
      std::ostringstream msg;
      msg << "source iteration did not converge at step " << n << ": residual "
          << residual << " after " << config.max_iterations << " iterations";
      throw std::runtime_error(msg.str());
    }
    // Moments consistent with the converged flux.
    SnMoments layer = moment_sweep(prob, quad, phi, psi_prev, dt, psi_work);
    phi = layer.phi;
    psi_prev = psi_work;
    sol.layers.push_back(std::move(layer));
    sol.iterations.push_back(iters + 1);
  }
  return sol;
}

namespace {

// Map of fine cells onto tally cells; requires exact nesting.
std::vector<int> nesting_map(const Mesh1D& fine, const Mesh1D& coarse) {
  if (std::abs(fine.x_min() - coarse.x_min()) > 1e-9 ||
      std::abs(fine.x_max() - coarse.x_max()) > 1e-9)
    throw std::invalid_argument("fine and tally meshes cover different domains");
  std::vector<int> owner(fine.cells());
  int c = 0;
  for (int f = 0; f < fine.cells(); ++f) {
    const double mid = fine.center(f);
    while (c + 1 < coarse.cells() && mid > coarse.edge(c + 1)) ++c;
    if (mid < coarse.edge(c) || mid > coarse.edge(c + 1))
      throw std::invalid_argument("fine mesh does not nest the tally mesh");
    owner[f] = c;
  }
  return owner;
}

std::vector<double> project_layer(std::span<const double> fine_phi,
                                  const Mesh1D& fine, const Mesh1D& coarse,
                                  const std::vector<int>& owner) {
  std::vector<double> out(coarse.cells(), 0.0);
  for (int f = 0; f < fine.cells(); ++f)
    out[owner[f]] += fine_phi[f] * fine.width(f);
  for (int c = 0; c < coarse.cells(); ++c) out[c] /= coarse.width(c);
  return out;
}

}  // namespace

ReferenceSolution project(const SnSolution& fine, const Mesh1D& tally_mesh,
                          const TimeGrid& tally_tgrid) {
  const int fine_layers = fine.tgrid.steps();
  const int steps = tally_tgrid.steps();
  if (fine_layers % steps != 0)
    throw std::invalid_argument("fine time grid must refine the tally grid");
  const int ratio = fine_layers / steps;
  for (int n = 0; n <= steps; ++n) {
    if (std::abs(fine.tgrid.layer(n * ratio) - tally_tgrid.layer(n)) > 1e-9)
      throw std::invalid_argument("fine time layers do not align with the tally grid");
  }
  const std::vector<int> owner = nesting_map(fine.mesh, tally_mesh);

  ReferenceSolution ref;
  ref.mesh = tally_mesh;
  ref.tgrid = tally_tgrid;
  ref.phi_layer.resize(steps + 1);
  ref.phi_interval.assign(steps, std::vector<double>(tally_mesh.cells(), 0.0));

  std::vector<double> projected;
  for (int m = 0; m <= fine_layers; ++m) {
    projected = project_layer(fine.layers[m].phi, fine.mesh, tally_mesh, owner);
    if (m % ratio == 0) ref.phi_layer[m / ratio] = projected;
    // Trapezoid-in-time accumulation into the covering step(s).
    const int step_right = m / ratio;  // step index (1-based) is step_right for m>...
    const double half = 0.5 / ratio;
    const bool interior = (m % ratio) != 0;
    for (int c = 0; c < tally_mesh.cells(); ++c) {
      const double v = projected[c];
      if (interior) {
        ref.phi_interval[step_right][c] += v / ratio;
      } else {
        if (step_right >= 1) ref.phi_interval[step_right - 1][c] += v * half;
        if (step_right < steps) ref.phi_interval[step_right][c] += v * half;
      }
    }
  }
  return ref;
}

SnProblem pulse_problem(const RunConfig& config, int space_refine, int time_refine) {
  if (space_refine < 1 || time_refine < 1)
    throw std::invalid_argument("refinement factors must be >= 1");
  const Mesh1D tally_mesh = config.make_mesh();

  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(tally_mesh.cells()) * space_refine + 1);
  for (int c = 0; c < tally_mesh.cells(); ++c) {
    const double x0 = tally_mesh.edge(c);
    const double w = tally_mesh.width(c) / space_refine;
    for (int s = 0; s < space_refine; ++s) edges.push_back(x0 + s * w);
  }
  edges.push_back(tally_mesh.x_max());

  SnProblem prob;
  prob.mesh = Mesh1D::from_edges(std::move(edges));
  prob.materials.assign(prob.mesh.cells(), config.material);
  prob.tgrid = TimeGrid::uniform(0.0, config.t_end, config.time_steps * time_refine);
  prob.q.assign(prob.mesh.cells(), 0.0);
  return prob;
}

namespace {

void load_pulse_ic(SnProblem& prob, double x0, double strength, int order) {
  const Mesh1D& mesh = prob.mesh;
  const int cells = mesh.cells();
  prob.psi0.assign(static_cast<std::size_t>(order) * cells, 0.0);
  prob.inc_left.assign(order, 0.0);
  prob.inc_right.assign(order, 0.0);

  const auto cell = mesh.locate(x0);
  if (!cell) throw std::invalid_argument("pulse position outside the mesh");
  // Density strength/dx shared between the adjacent cells when the pulse
  // sits on an interior edge.
  struct Part { int cell; double frac; };
  std::vector<Part> parts;
  const double tol = 1e-12 * (mesh.x_max() - mesh.x_min());
  int on_edge = -1;
  for (int e = 1; e < cells; ++e)
    if (std::abs(mesh.edge(e) - x0) <= tol) { on_edge = e; break; }
  if (on_edge >= 0) {
    parts.push_back({on_edge - 1, 0.5});
    parts.push_back({on_edge, 0.5});
  } else {
    parts.push_back({*cell, 1.0});
  }
  for (const auto& part : parts) {
    // Isotropic angular density: phi = v * n, psi = phi / 2.
    const double psi =
        0.5 * prob.materials[part.cell].speed * strength * part.frac / mesh.width(part.cell);
    for (int k = 0; k < order; ++k)
      prob.psi0[static_cast<std::size_t>(k) * cells + part.cell] = psi;
  }
}

}  // namespace

ReferenceSolution compute_reference(const RunConfig& config, int space_refine,
                                    int time_refine, int sn_order) {
  SnProblem prob = pulse_problem(config, space_refine, time_refine);
  load_pulse_ic(prob, config.source.x0, config.source.strength, sn_order);
  SnConfig sn;
  sn.quadrature_order = sn_order;
  const SnSolution fine = sn_solve(prob, sn);
  return project(fine, config.make_mesh(), config.make_time_grid());
}

void save_reference(const ReferenceSolution& ref, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open reference file for writing: " + path);
  out.precision(17);
  out << "t_layer, cell_index, x_center, phi_layer, phi_interval_avg\n";
  const int steps = ref.tgrid.steps();
  for (int n = 0; n <= steps; ++n) {
    for (int c = 0; c < ref.mesh.cells(); ++c) {
      out << ref.tgrid.layer(n) << ", " << c << ", " << ref.mesh.center(c) << ", "
          << ref.phi_layer[n][c] << ", ";
      if (n == 0)
        out << "nan";
      else
        out << ref.phi_interval[n - 1][c];
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing reference file: " + path);
}

ReferenceSolution load_reference(const std::string& path, const Mesh1D& mesh,
                                 const TimeGrid& tgrid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("reference file is empty: " + path);

  ReferenceSolution ref;
  ref.mesh = mesh;
  ref.tgrid = tgrid;
  const int steps = tgrid.steps();
  const int cells = mesh.cells();
  ref.phi_layer.assign(steps + 1, std::vector<double>(cells, 0.0));
  ref.phi_interval.assign(steps, std::vector<double>(cells, 0.0));

  int rows = 0;
  const int expected_rows = (steps + 1) * cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    // Tokens parse through stod so "nan" in the interval column round-trips
    // (istream extraction rejects it).
    std::string tok_t, tok_cell, tok_x, tok_phi, tok_interval;
    if (!(ss >> tok_t >> tok_cell >> tok_x >> tok_phi >> tok_interval))
      throw std::runtime_error("malformed reference row: " + line);
    double t, x, phi, interval;
    int cell;
    try {
      t = std::stod(tok_t);
      cell = std::stoi(tok_cell);
      x = std::stod(tok_x);
      phi = std::stod(tok_phi);
      interval = std::stod(tok_interval);
    } catch (const std::exception&) {
      throw std::runtime_error("malformed reference row: " + line);
    }
    if (rows >= expected_rows)
      throw std::runtime_error("reference file has more rows than expected " +
                               std::to_string(expected_rows));
    const int layer = rows / cells;
    const int expect_cell = rows % cells;
    if (cell != expect_cell)
      throw std::runtime_error("reference cell index mismatch: expected " +
                               std::to_string(expect_cell) + ", found " +
                               std::to_string(cell));
    if (std::abs(t - tgrid.layer(layer)) > 1e-9)
      throw std::runtime_error("reference layer time mismatch at layer " +
                               std::to_string(layer));
    if (std::abs(x - mesh.center(cell)) > 1e-9 * (mesh.x_max() - mesh.x_min()))
      throw std::runtime_error("reference cell center mismatch at cell " +
                               std::to_string(cell));
    ref.phi_layer[layer][cell] = phi;
    if (layer >= 1) ref.phi_interval[layer - 1][cell] = interval;
    ++rows;
  }
  if (rows != expected_rows)
    throw std::runtime_error("reference shape mismatch: expected " +
                             std::to_string(expected_rows) + " rows, found " +
                             std::to_string(rows));
  return ref;
}

}  // namespace hww

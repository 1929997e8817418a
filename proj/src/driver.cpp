#include "hww/driver.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hww {

namespace {

constexpr double kLowFluxThreshold = 1e-3;  // phi* for the modified norms

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

GridFunction with_boundary_extrapolated(const std::vector<double>& cell_values) {
  GridFunction g;
  g.placement = Placement::cell_with_boundary;
  g.values.reserve(cell_values.size() + 2);
  g.values.push_back(cell_values.front());
  g.values.insert(g.values.end(), cell_values.begin(), cell_values.end());
  g.values.push_back(cell_values.back());
  return g;
}

}  // namespace

HybridInputs hybrid_inputs_from_report(const TallyReport& report, const Mesh1D& mesh) {
  HybridInputs in;
  in.phi_prev = with_boundary_extrapolated(report.phi_census);
  in.F_prev = with_boundary_extrapolated(report.closure_census);
  in.J_prev = edge_currents_from_census(report.current_census, mesh);
  in.PL_prev = report.boundary_closure_left;
  in.PR_prev = report.boundary_closure_right;
  return in;
}

HybridInputs analytic_pulse_inputs(const Mesh1D& mesh, const SourceSpec& source,
                                   double speed) {
  HybridInputs in;
  in.phi_prev = GridFunction::cell_with_boundary(mesh.cells());
  in.J_prev = GridFunction::edge(mesh.cells());
  in.F_prev = GridFunction::cell_with_boundary(mesh.cells());
  const auto cell = mesh.locate(source.x0);
  if (!cell) throw std::invalid_argument("source position outside the mesh");
  in.phi_prev[*cell + 1] = speed * source.strength / mesh.width(*cell);
  return in;
}

namespace {

struct WindowState {
  bool active = false;
  WeightWindowGrid grid;
};

// Build window centers from a hybrid solve; falls back to the previous grid
// (or the uniform grid) when the solve fails.
bool hybrid_windows(const LOSMState& prev_state, const ClosureInput& closures,
                    const RunConfig& config, double theta, const Mesh1D& mesh,
                    const std::vector<Material>& materials, double dt,
                    WindowState& windows, std::vector<double>& phi_hybrid_out) {
  try {
    const GridFunction q = GridFunction::cell(mesh.cells());
    const LOSMState solved =
        assemble_solve(prev_state, closures, theta, dt, materials, mesh, q);
    phi_hybrid_out.assign(solved.phi.values.begin() + 1, solved.phi.values.end() - 1);
    windows.grid = build_centers(phi_hybrid_out, config.eps_min, config.rho);
    windows.active = true;
    return true;
  } catch (const std::exception& e) {
    if (!windows.active) {
      windows.grid = build_centers({}, config.eps_min, config.rho);
      windows.grid.uniform_fallback = true;
      windows.grid.centers.assign(mesh.cells(), 1.0);
      windows.active = true;
    }
    std::cerr << "warning: low-order solve failed (" << e.what()
              << "); keeping previous windows\n";
    return false;
  }
}

}  // namespace

StepRecord run_step(int step, RunState& state, const RunConfig& config,
                    const Mesh1D& mesh, const TimeGrid& tgrid,
                    const std::vector<Material>& materials,
                    const ReferenceSolution* reference) {
  StepRecord record;
  record.step = step;
  record.t_begin = tgrid.layer(step - 1);
  record.t_end = tgrid.layer(step);
  const double dt = tgrid.dt(step);

  const auto t0 = Clock::now();

  // Population control: comb the incoming bank to the target count. Above
  // an overflow factor of 1 the comb is skipped while the bank stays small
  // enough, letting low-weight tail particles persist between steps.
  ParticleBank source;
  const double bank_cap =
      config.comb_overflow_factor * static_cast<double>(config.comb_target());
  if (config.comb_overflow_factor <= 1.0 ||
      static_cast<double>(state.bank.size()) > bank_cap) {
    RngStream comb_rng =
        spawn_stream(config.seed, stream_id(step, 0, StreamPurpose::comb));
    CombResult comb = uniform_comb(state.bank, config.comb_target(), comb_rng);
    record.comb = {comb.input_count, comb.output_count, comb.input_weight,
                   comb.output_weight};
    source = std::move(comb.bank);
  } else {
    record.comb = {state.bank.size(), state.bank.size(), total_weight(state.bank),
                   total_weight(state.bank)};
    source = std::move(state.bank);
  }
  const std::uint64_t histories = source.size();

  // Window construction. The cold-start step always solves with backward
  // Euler: the Crank-Nicolson half-step applied to the delta-impulse initial
  // condition rings at the source cell, which would hand the highest-weight
  // particles an eps_min window and detonate the splitting cascade.
  WindowState windows;
  HybridInputs filtered_inputs;
  LOSMState prev_state = LOSMState::zero(mesh.cells());
  const FilterSpec filter = config.filter();
  const double theta_eff = step == 1 ? 1.0 : config.theta;

  if (config.mode == Mode::lww) {
    WeightWindowGrid grid =
        lww_centers(state.prev_phi_track, config.eps_min, config.rho);
    if (!grid.uniform_fallback) {  // no lagged flux yet: run analog
      windows.grid = std::move(grid);
      windows.active = true;
    }
  } else if (config.uses_hybrid_windows()) {
    filtered_inputs =
        step == 1 ? analytic_pulse_inputs(mesh, config.source, config.material.speed)
                  : hybrid_inputs_from_report(*state.prev_report, mesh);
    apply_filter_pipeline(nullptr, filtered_inputs.F_prev, filtered_inputs.phi_prev,
                          filtered_inputs.J_prev, filter);
    prev_state.phi = filtered_inputs.phi_prev;
    prev_state.current = filtered_inputs.J_prev;
    const ClosureInput semi_implicit = ClosureInput::lagged(
        filtered_inputs.F_prev, filtered_inputs.PL_prev, filtered_inputs.PR_prev);
    if (state.prev_grid) {
      windows.grid = *state.prev_grid;
      windows.active = true;
    }
    record.hybrid_solve_failed =
        !hybrid_windows(prev_state, semi_implicit, config, theta_eff, mesh,
                        materials, dt, windows, record.phi_hybrid) ||
        record.hybrid_solve_failed;
  }

  // Mid-step update schedule.
  std::vector<std::uint64_t> thresholds;
  if (config.uses_hybrid_windows() && config.u_ww > 0) {
    for (std::uint64_t h : update_thresholds(histories, config.update_fractions)) {
      if (h >= histories) continue;
      if (!thresholds.empty() && h <= thresholds.back()) continue;
      thresholds.push_back(h);
    }
  }
  record.update_thresholds = thresholds;

  // Transport in schedule segments with window-update barriers.
  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &materials;
  ctx.t_begin = record.t_begin;
  ctx.t_end = record.t_end;
  ctx.seed = config.seed;
  ctx.step_index = step;
  ctx.histories_total = histories;
  ctx.batches = config.batches;

  TallySet tallies(mesh.cells(), config.batches);
  StepOutcome outcome(mesh.cells());

  std::uint64_t h_done = 0;
  auto run_to = [&](std::uint64_t h_stop) {
    run_segment_parallel(ctx,
                         std::span<const Particle>(source).subspan(
                             h_done, h_stop - h_done),
                         h_done, windows.active ? &windows.grid : nullptr, tallies,
                         outcome);
    h_done = h_stop;
  };

  for (std::uint64_t h_update : thresholds) {
    run_to(h_update);
    const TallyReport snapshot = partial_snapshot(
        tallies, h_done, histories, static_cast<double>(config.histories_per_step));
    GridFunction F_now = with_boundary_extrapolated(snapshot.closure_census);
    filter_cell_avg_with_boundary(F_now, filter);
    const ClosureInput implicit = ClosureInput::implicit(
        std::move(F_now), snapshot.boundary_closure_left,
        snapshot.boundary_closure_right, filtered_inputs.F_prev,
        filtered_inputs.PL_prev, filtered_inputs.PR_prev);
    const bool ok = hybrid_windows(prev_state, implicit, config, theta_eff, mesh,
                                   materials, dt, windows, record.phi_hybrid);
    record.hybrid_solve_failed = record.hybrid_solve_failed || !ok;
    if (ok) ++record.updates_applied;
  }
  run_to(histories);

  record.report =
      finalize(tallies, histories, static_cast<double>(config.histories_per_step));
  record.counters = outcome.counters;
  record.tracks_per_cell = std::move(outcome.tracks_per_cell);
  if (windows.active) record.ww_centers = windows.grid.centers;

  record.metrics.step = step;
  record.metrics.time = record.t_end;
  record.metrics.tau = seconds_since(t0);

  // Diagnostics against the deterministic reference.
  auto& m = record.metrics;
  const double tau = std::max(m.tau, 1e-9);
  if (reference) {
    const auto ref_interval = reference->interval_avg(step);
    const auto ref_layer = reference->layer(step);
    const auto ref_layer_prev = reference->layer(step - 1);

    std::vector<double> err(mesh.cells());
    for (int i = 0; i < mesh.cells(); ++i)
      err[i] = record.report.phi_track[i] - ref_interval[i];

    const double ref_norm = l2_norm(ref_interval, mesh);
    if (ref_norm > 0.0) m.rel_l2_error = l2_norm(err, mesh) / ref_norm;

    bool empty_mask = false;
    const double ref_mod =
        modified_l2_norm(ref_interval, mesh, ref_layer, kLowFluxThreshold, &empty_mask);
    if (!empty_mask && ref_mod > 0.0)
      m.rel_mod_l2_error =
          modified_l2_norm(err, mesh, ref_layer, kLowFluxThreshold) / ref_mod;

    if (!record.phi_hybrid.empty()) {
      std::vector<double> herr(mesh.cells());
      for (int i = 0; i < mesh.cells(); ++i)
        herr[i] = record.phi_hybrid[i] - ref_layer[i];
      const double layer_norm = l2_norm(ref_layer, mesh);
      if (layer_norm > 0.0) m.hybrid_rel_l2_error = l2_norm(herr, mesh) / layer_norm;
    }

    const FomResult fe = fom(err, tau, mesh, ref_layer, kLowFluxThreshold);
    m.fom_err_l2 = fe.l2;
    m.fom_err_mod = fe.modified_l2;
    m.alpha = relative_change(ref_layer, ref_layer_prev, mesh);

    if (record.report.sigma_valid) {
      const FomResult fs =
          fom(record.report.phi_track_sigma, tau, mesh, ref_layer, kLowFluxThreshold);
      m.fom_sigma_l2 = fs.l2;
      m.fom_sigma_mod = fs.modified_l2;
    }
  } else if (record.report.sigma_valid) {
    const FomResult fs = fom(record.report.phi_track_sigma, tau, mesh, {}, 0.0);
    m.fom_sigma_l2 = fs.l2;
  }

  // Thread state to the next step.
  state.bank = std::move(outcome.census);
  state.prev_report = record.report;
  state.prev_phi_track = record.report.phi_track;
  if (windows.active) state.prev_grid = windows.grid;

  return record;
}

RunRecord run(const RunConfig& config, const ReferenceSolution* reference) {
  if (const auto violations = validate_config(config); !violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw std::invalid_argument(msg);
  }

#ifdef _OPENMP
  if (config.threads > 0) omp_set_num_threads(config.threads);
#endif

  const Mesh1D mesh = config.make_mesh();
  const TimeGrid tgrid = config.make_time_grid();
  const std::vector<Material> materials(mesh.cells(), config.material);

  const bool writing = !config.out_dir.empty();
  if (writing) std::filesystem::create_directories(config.out_dir);

  RunRecord record;
  record.config = config;
  const auto t0 = Clock::now();

  RunState state;
  {
    RngStream source_rng =
        spawn_stream(config.seed, stream_id(0, 0, StreamPurpose::source));
    const double total_weight =
        config.source.strength * static_cast<double>(config.histories_per_step);
    state.bank = sample_pulse_source(config.histories_per_step, config.source.x0,
                                     total_weight, 0.0, source_rng);
  }

  try {
    for (int n = 1; n <= tgrid.steps(); ++n) {
      StepRecord step_record =
          run_step(n, state, config, mesh, tgrid, materials, reference);
      record.steps.push_back(std::move(step_record));
      if (writing) {
        write_step_csv(config.out_dir, record.steps.back(), mesh);
        write_summary_csv(config.out_dir, record);
      }
    }
  } catch (...) {
    if (writing) {
      std::ofstream marker(std::filesystem::path(config.out_dir) / "INCOMPLETE");
      marker << "run aborted before completing all steps\n";
    }
    throw;
  }

  record.total_seconds = seconds_since(t0);
  if (writing) {
    write_summary_csv(config.out_dir, record);
    write_run_json(config.out_dir, record);
  }
  return record;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

void write_step_csv(const std::string& dir, const StepRecord& record,
                    const Mesh1D& mesh) {
  auto out = open_out(std::filesystem::path(dir) /
                      ("step_" + std::to_string(record.step) + ".csv"));
  out << "cell, x_center, phi_track, sigma, phi_census, J_census, F_census, "
         "ww_center, phi_hlosm, tracks_per_source\n";
  const double inv_h = 1.0 / record.report.normalization;
  for (int i = 0; i < mesh.cells(); ++i) {
    out << i << ", " << mesh.center(i) << ", " << record.report.phi_track[i] << ", "
        << (record.report.sigma_valid ? record.report.phi_track_sigma[i]
                                      : std::numeric_limits<double>::quiet_NaN())
        << ", " << record.report.phi_census[i] << ", "
        << record.report.current_census[i] << ", " << record.report.closure_census[i]
        << ", "
        << (record.ww_centers.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : record.ww_centers[i])
        << ", "
        << (record.phi_hybrid.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : record.phi_hybrid[i])
        << ", " << static_cast<double>(record.tracks_per_cell[i]) * inv_h << '\n';
  }
}

void write_summary_csv(const std::string& dir, const RunRecord& record) {
  auto out = open_out(std::filesystem::path(dir) / "summary.csv");
  out << "step, t_end, histories, tau_seconds, rel_l2_error, rel_mod_l2_error, "
         "hybrid_rel_l2_error, fom_err_l2, fom_err_mod, fom_sigma_l2, "
         "fom_sigma_mod, alpha, census_weight, census_weight_sigma, "
         "comb_in_count, comb_out_count, leakage_weight, collisions, splits, "
         "split_daughters, roulette_kills, roulette_survivals, census_count, "
         "event_cap_aborts, aborted_weight, updates_applied, "
         "hybrid_solve_failed\n";
  for (const auto& s : record.steps) {
    const auto& m = s.metrics;
    out << s.step << ", " << s.t_end << ", " << s.report.histories << ", " << m.tau
        << ", " << m.rel_l2_error << ", " << m.rel_mod_l2_error << ", "
        << m.hybrid_rel_l2_error << ", " << m.fom_err_l2 << ", " << m.fom_err_mod
        << ", " << m.fom_sigma_l2 << ", " << m.fom_sigma_mod << ", " << m.alpha
        << ", " << s.report.census_weight << ", " << s.report.census_weight_sigma
        << ", " << s.comb.input_count << ", " << s.comb.output_count << ", "
        << s.counters.leakage_weight << ", " << s.counters.collisions << ", "
        << s.counters.splits << ", " << s.counters.split_daughters << ", "
        << s.counters.roulette_kills << ", " << s.counters.roulette_survivals << ", "
        << s.counters.census_count << ", " << s.counters.event_cap_aborts << ", "
        << s.counters.aborted_weight << ", " << s.updates_applied << ", "
        << (s.hybrid_solve_failed ? 1 : 0) << '\n';
  }
}

void write_run_json(const std::string& dir, const RunRecord& record) {
  nlohmann::json j;
  const RunConfig& c = record.config;
  j["config"] = {
      {"mode", to_string(c.mode)},
      {"histories_per_step", c.histories_per_step},
      {"theta", c.theta},
      {"rho", c.rho},
      {"eps_min", c.eps_min},
      {"u_ww", c.u_ww},
      {"update_fractions", c.update_fractions},
      {"ma_base_k", c.ma_base_k},
      {"fourier_cutoff", c.fourier_cutoff},
      {"batches", c.batches},
      {"seed", c.seed},
      {"target_population", c.comb_target()},
      {"source", {{"x0", c.source.x0}, {"t0", c.source.t0}, {"strength", c.source.strength}}},
      {"material",
       {{"sigma_t", c.material.sigma_t},
        {"sigma_s", c.material.sigma_s},
        {"sigma_f", c.material.sigma_f},
        {"nu_f", c.material.nu_f},
        {"speed", c.material.speed}}},
      {"mesh", {{"x_min", c.x_min}, {"x_max", c.x_max}, {"cells", c.cells}}},
      {"time", {{"t_end", c.t_end}, {"steps", c.time_steps}}},
      {"reference", c.reference},
      {"threads", c.threads},
  };
  j["total_seconds"] = record.total_seconds;
  j["steps_completed"] = record.steps.size();
  j["tau_includes"] =
      "comb, transport, window updates, low-order solves, tally finalize";
  auto out = open_out(std::filesystem::path(dir) / "run.json");
  out << j.dump(2) << '\n';
}

}  // namespace hww

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hww/config.hpp"
#include "hww/losm.hpp"
#include "hww/metrics.hpp"
#include "hww/popctrl.hpp"
#include "hww/reference.hpp"
#include "hww/tally.hpp"
#include "hww/transport.hpp"
#include "hww/ww.hpp"

namespace hww {

/// Monte Carlo inputs to one low-order solve: previous-layer flux (cells
/// plus boundary point values), cell-edge currents, closures, and boundary
/// closure scalars.
struct HybridInputs {
  GridFunction phi_prev;  // cell_with_boundary
  GridFunction J_prev;    // edge
  GridFunction F_prev;    // cell_with_boundary
  double PL_prev = 0.0;
  double PR_prev = 0.0;
};

/// Census-tally estimates of the previous layer, with boundary point values
/// by constant extrapolation and edge currents by linear interpolation.
HybridInputs hybrid_inputs_from_report(const TallyReport& report, const Mesh1D& mesh);

/// Cold start for the first step: the analytic initial state (zero flux plus
/// the point pulse loaded into its cell), zero currents and closures.
HybridInputs analytic_pulse_inputs(const Mesh1D& mesh, const SourceSpec& source,
                                   double speed);

struct CombStats {
  std::size_t input_count = 0;
  std::size_t output_count = 0;
  double input_weight = 0.0;
  double output_weight = 0.0;
};

/// Everything recorded about one time step.
struct StepRecord {
  int step = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  TallyReport report;
  std::vector<double> ww_centers;   // empty in analog mode
  std::vector<double> phi_hybrid;   // cells; last low-order solve of the step
  std::vector<std::uint64_t> tracks_per_cell;
  StepCounters counters;
  CombStats comb;
  StepMetrics metrics;
  std::vector<std::uint64_t> update_thresholds;
  int updates_applied = 0;
  bool hybrid_solve_failed = false;
};

struct RunRecord {
  RunConfig config;
  std::vector<StepRecord> steps;
  double total_seconds = 0.0;
};

/// Per-step driver state threaded between steps.
struct RunState {
  ParticleBank bank;  // census of the previous step
  std::optional<TallyReport> prev_report;
  std::vector<double> prev_phi_track;          // lagged-window source
  std::optional<WeightWindowGrid> prev_grid;   // fallback for failed solves
};

/// One full step: comb, build windows (per mode), run the history segments
/// with mid-step window updates, finalize tallies, compute metrics. Returns
/// the record and replaces state.bank with the census bank.
StepRecord run_step(int step, RunState& state, const RunConfig& config,
                    const Mesh1D& mesh, const TimeGrid& tgrid,
                    const std::vector<Material>& materials,
                    const ReferenceSolution* reference);

/// Full simulation; writes per-step and summary files continuously when
/// config.out_dir is set. The reference is optional: without it the
/// error-based metrics stay NaN.
RunRecord run(const RunConfig& config, const ReferenceSolution* reference = nullptr);

/// Output writers (also used by the CLI).
void write_step_csv(const std::string& dir, const StepRecord& record,
                    const Mesh1D& mesh);
void write_summary_csv(const std::string& dir, const RunRecord& record);
void write_run_json(const std::string& dir, const RunRecord& record);

}  // namespace hww

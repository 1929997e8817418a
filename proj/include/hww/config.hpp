#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hww/filters.hpp"
#include "hww/material.hpp"
#include "hww/mesh.hpp"
#include "hww/time_grid.hpp"

namespace hww {

/// Run modes: analog Monte Carlo, lagged weight windows, and hybrid weight
/// windows (unfiltered / moving-average / Fourier-filtered closures).
enum class Mode { analog, lww, hww, hww_ma, hww_fourier };

const char* to_string(Mode mode);
std::optional<Mode> mode_from_string(std::string_view name);

/// Isotropic point pulse: all particles start at x0 with clock time t0.
/// strength is the physical total source (the reference solution is
/// normalized to it); each Monte Carlo history carries strength/1 per
/// history after per-history normalization.
struct SourceSpec {
  double x0 = 0.0;
  double t0 = 0.0;
  double strength = 1.0;
};

struct RunConfig {
  Mode mode = Mode::hww;

  std::uint64_t histories_per_step = 10'000;
  double theta = 0.5;
  double rho = 1.25;
  double eps_min = 1e-3;
  int u_ww = 3;
  std::vector<double> update_fractions = {0.25, 0.5, 0.75};
  int ma_base_k = 3;
  int fourier_cutoff = 30;
  int batches = 20;
  std::uint64_t seed = 1;
  std::uint64_t target_population = 0;  // 0 -> histories_per_step

  // Comb when the bank exceeds comb_overflow_factor * target. 1 combs every
  // step; large values let low-weight tail populations persist across steps
  // at the cost of bank growth (deep eps_min studies need this, since a
  // weight-proportional comb erases the front tail each step).
  double comb_overflow_factor = 1.0;

  SourceSpec source;
  Material material{1.0, 1.0 / 3.0, 1.0 / 3.0, 2.3, 1.0};

  double x_min = -20.5;
  double x_max = 20.5;
  int cells = 201;

  double t_end = 20.0;
  int time_steps = 20;

  std::string reference = "auto";  // "auto" | file path | "" (no reference)
  std::string out_dir;             // empty -> no file output
  int threads = 0;                 // 0 -> runtime default

  /// The supercritical point-pulse benchmark configuration.
  static RunConfig benchmark() { return RunConfig{}; }

  std::uint64_t comb_target() const {
    return target_population ? target_population : histories_per_step;
  }

  FilterSpec filter() const {
    switch (mode) {
      case Mode::hww_ma: return FilterSpec::moving_average(ma_base_k);
      case Mode::hww_fourier: return FilterSpec::fourier_lowpass(fourier_cutoff);
      default: return FilterSpec::none();
    }
  }

  bool uses_hybrid_windows() const {
    return mode == Mode::hww || mode == Mode::hww_ma || mode == Mode::hww_fourier;
  }

  Mesh1D make_mesh() const { return build_uniform_mesh(x_min, x_max, cells); }
  TimeGrid make_time_grid() const { return TimeGrid::uniform(0.0, t_end, time_steps); }
};

/// Checks every invariant; returns human-readable violations instead of
/// aborting. An empty result means the configuration is usable.
std::vector<std::string> validate_config(const RunConfig& config);

}  // namespace hww

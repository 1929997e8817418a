#pragma once

#include <cstdint>
#include <vector>

#include "hww/rng.hpp"

namespace hww {

/// Per-cell weight-window centers in (0,1] with width parameter rho >= 1.
/// Centers are the auxiliary flux normalized to unit maximum, rescaled onto
/// [eps_min, 1] so they never fall below eps_min.
struct WeightWindowGrid {
  std::vector<double> centers;
  double rho = 1.25;
  double eps_min = 1e-3;
  bool uniform_fallback = false;  // set when the auxiliary flux was unusable

  struct Window {
    double floor;
    double center;
    double ceiling;
  };

  Window window(int cell) const {
    const double c = centers[cell];
    return {c / rho, c, c * rho};
  }
};

/// Build centers from an auxiliary flux; negative values are clamped to zero
/// before normalizing. An identically nonpositive flux yields the uniform
/// fallback (all centers 1).
WeightWindowGrid build_centers(const std::vector<double>& phi_tilde,
                               double eps_min, double rho);

/// Lagged-window baseline: identical construction applied to the previous
/// step's track-length mean. An empty vector (no previous step) yields the
/// uniform fallback.
WeightWindowGrid lww_centers(const std::vector<double>& prev_step_flux,
                             double eps_min, double rho);

enum class WindowAction { unchanged, split, roulette_killed, roulette_survived };

struct WindowOutcome {
  WindowAction action = WindowAction::unchanged;
  int daughters = 0;       // split: total daughters including the survivor
  double new_weight = 0.0; // split: per-daughter; roulette survival: center
  bool capped = false;     // split truncated by the daughter cap
};

/// Safety cap on daughters from a single split.
inline constexpr int kMaxSplitDaughters = 1'000'000;

/// Weight-window game for one particle at one site: split above the ceiling
/// into ceil(w/center) equal-weight daughters (exact weight conservation),
/// roulette below the floor with survival probability w/center (survivor
/// boosted to the center), otherwise unchanged.
WindowOutcome apply_window(double w, const WeightWindowGrid& grid, int cell,
                           RngStream& rng);

/// History-count thresholds ceil(f_p * H) for the mid-step window updates.
std::vector<std::uint64_t> update_thresholds(std::uint64_t histories,
                                             const std::vector<double>& fractions);

}  // namespace hww

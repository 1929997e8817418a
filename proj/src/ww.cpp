#include "hww/ww.hpp"

#include <cmath>
#include <stdexcept>

namespace hww {

WeightWindowGrid build_centers(const std::vector<double>& phi_tilde,
                               double eps_min, double rho) {
  if (!(eps_min > 0.0 && eps_min < 1.0))
    throw std::invalid_argument("eps_min must lie in (0,1)");
  if (!(rho >= 1.0)) throw std::invalid_argument("rho must be >= 1");

  WeightWindowGrid grid;
  grid.rho = rho;
  grid.eps_min = eps_min;
  grid.centers.resize(phi_tilde.size(), 1.0);

  double max_val = 0.0;
  for (double v : phi_tilde)
    if (v > max_val) max_val = v;

  if (!(max_val > 0.0) || !std::isfinite(max_val)) {
    grid.uniform_fallback = true;
    return grid;
  }
  for (std::size_t i = 0; i < phi_tilde.size(); ++i) {
    const double clamped = phi_tilde[i] > 0.0 ? phi_tilde[i] : 0.0;
    grid.centers[i] = (clamped / max_val) * (1.0 - eps_min) + eps_min;
  }
  return grid;
}

WeightWindowGrid lww_centers(const std::vector<double>& prev_step_flux,
                             double eps_min, double rho) {
  if (prev_step_flux.empty()) {
    WeightWindowGrid grid;
    grid.rho = rho;
    grid.eps_min = eps_min;
    grid.uniform_fallback = true;
    return grid;
  }
  return build_centers(prev_step_flux, eps_min, rho);
}

WindowOutcome apply_window(double w, const WeightWindowGrid& grid, int cell,
                           RngStream& rng) {
  const auto win = grid.window(cell);
  WindowOutcome out;
  if (w > win.ceiling) {
    double n = std::ceil(w / win.center);
    out.action = WindowAction::split;
    if (n > kMaxSplitDaughters) {
      n = kMaxSplitDaughters;
      out.capped = true;
    }
    out.daughters = static_cast<int>(n);
    out.new_weight = w / n;
    return out;
  }
  if (w < win.floor) {
    const double survival = w / win.center;
    if (rng.uniform() < survival) {
      out.action = WindowAction::roulette_survived;
      out.new_weight = win.center;
    } else {
      out.action = WindowAction::roulette_killed;
    }
    return out;
  }
  return out;
}

std::vector<std::uint64_t> update_thresholds(std::uint64_t histories,
                                             const std::vector<double>& fractions) {
  std::vector<std::uint64_t> thresholds;
  thresholds.reserve(fractions.size());
  double prev = 0.0;
  for (double f : fractions) {
    if (!(f > prev && f < 1.0))
      throw std::invalid_argument("update fractions must increase within (0,1)");
    prev = f;
    thresholds.push_back(
        static_cast<std::uint64_t>(std::ceil(f * static_cast<double>(histories))));
  }
  return thresholds;
}

}  // namespace hww

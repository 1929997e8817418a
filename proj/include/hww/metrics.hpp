#pragma once

#include <limits>
#include <span>
#include <vector>

#include "hww/mesh.hpp"

namespace hww {

/// ||f||_L2 = sqrt(sum_i f_i^2 dx_i) over cell averages.
double l2_norm(std::span<const double> f, const Mesh1D& mesh);

/// Same sum restricted to cells where mask_flux_i < phi_star. An empty mask
/// set yields 0 and sets *empty_mask when provided.
double modified_l2_norm(std::span<const double> f, const Mesh1D& mesh,
                        std::span<const double> mask_flux, double phi_star,
                        bool* empty_mask = nullptr);

/// Per-cell figure of merit 1/(tau * value^2); cells with zero value are
/// excluded from the aggregates and counted.
struct FomResult {
  std::vector<double> per_cell;  // 0 where excluded
  double l2 = 0.0;
  double modified_l2 = 0.0;
  int excluded = 0;
};

FomResult fom(std::span<const double> values, double tau, const Mesh1D& mesh,
              std::span<const double> mask_flux, double phi_star);

/// Relative change rate ||phi_now - phi_prev|| / ||phi_now||.
double relative_change(std::span<const double> phi_now,
                       std::span<const double> phi_prev, const Mesh1D& mesh);

/// Scalar diagnostics of one time step.
struct StepMetrics {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  int step = 0;
  double time = 0.0;
  double tau = 0.0;  // wall-clock seconds of the step's transport phase

  double rel_l2_error = nan;          // <phi> vs interval-average reference
  double rel_mod_l2_error = nan;      // same, low-flux cells only
  double hybrid_rel_l2_error = nan;   // last low-order solve vs layer reference
  double fom_err_l2 = nan;
  double fom_err_mod = nan;
  double fom_sigma_l2 = nan;
  double fom_sigma_mod = nan;
  double alpha = nan;  // reference relative change rate
};

}  // namespace hww

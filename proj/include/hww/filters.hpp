#pragma once

#include <vector>

#include "hww/grid.hpp"

namespace hww {

/// Noise filter applied to the Monte Carlo closures and initial conditions
/// that feed the low-order solve. Never touches the final tallies.
struct FilterSpec {
  enum class Kind { none, moving_average, fourier_lowpass };

  Kind kind = Kind::none;
  int ma_base = 0;        // half-width k of the moving average
  int fourier_cutoff = 0; // retained frequency index bound

  static FilterSpec none() { return {}; }
  static FilterSpec moving_average(int k) {
    return {Kind::moving_average, k, 0};
  }
  static FilterSpec fourier_lowpass(int cutoff) {
    return {Kind::fourier_lowpass, 0, cutoff};
  }
};

/// Centered moving average of half-width k. Near the boundaries the
/// half-width shrinks so the window never leaves the domain; k = 0 is the
/// identity.
std::vector<double> moving_average(const std::vector<double>& g, int k);

/// Discrete-Fourier low-pass: modes with min(j, M-j) <= cutoff are kept
/// (conjugate-symmetric retention), the rest zeroed; returns the real part
/// of the inverse transform. cutoff >= ceil(M/2) is the identity up to
/// round-off.
std::vector<double> fourier_lowpass(const std::vector<double>& g, int cutoff);

std::vector<double> apply_filter(const std::vector<double>& g, const FilterSpec& spec);

/// Filter the interior (cell-average) entries of a boundary-carrying grid
/// function; the two boundary point values are copied through.
void filter_cell_avg_with_boundary(GridFunction& g, const FilterSpec& spec);

/// Filter all entries of an edge-placed grid function.
void filter_edge(GridFunction& g, const FilterSpec& spec);

/// Filter the full set of low-order inputs: closures F^n (when present,
/// i.e. the fully implicit solve) and F^{n-1}, plus initial conditions
/// phi^{n-1} and J^{n-1}. Boundary closure scalars are never filtered.
void apply_filter_pipeline(GridFunction* F_now, GridFunction& F_prev,
                           GridFunction& phi_prev, GridFunction& J_prev,
                           const FilterSpec& spec);

}  // namespace hww

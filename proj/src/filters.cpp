#include "hww/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace hww {

std::vector<double> moving_average(const std::vector<double>& g, int k) {
  if (k < 0) throw std::invalid_argument("moving average half-width must be >= 0");
  const int m_count = static_cast<int>(g.size());
  if (k == 0 || m_count == 0) return g;
  std::vector<double> out(g.size());
  for (int m = 0; m < m_count; ++m) {
    // Half-width shrinks near the boundaries so the window stays inside.
    const int km = std::min({k, m, m_count - 1 - m});
    double sum = 0.0;
    for (int l = -km; l <= km; ++l) sum += g[m + l];
    out[m] = sum / (2 * km + 1);
  }
  return out;
}

std::vector<double> fourier_lowpass(const std::vector<double>& g, int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("fourier cutoff must be >= 0");
  const int m_count = static_cast<int>(g.size());
  if (m_count <= 1) return g;

  // Direct O(M^2) transform; grid functions here are a few hundred entries.
  using cd = std::complex<double>;
  const double w0 = 2.0 * std::numbers::pi / m_count;
  std::vector<cd> spectrum(m_count, cd(0.0, 0.0));
  for (int j = 0; j < m_count; ++j) {
    if (std::min(j, m_count - j) > cutoff) continue;  // zeroed mode
    cd acc(0.0, 0.0);
    for (int m = 0; m < m_count; ++m)
      acc += g[m] * std::polar(1.0, -w0 * j * m);
    spectrum[j] = acc;
  }
  std::vector<double> out(m_count);
  for (int m = 0; m < m_count; ++m) {
    cd acc(0.0, 0.0);
    for (int j = 0; j < m_count; ++j) {
      if (spectrum[j] == cd(0.0, 0.0)) continue;
      acc += spectrum[j] * std::polar(1.0, w0 * j * m);
    }
    out[m] = acc.real() / m_count;
  }
  return out;
}

std::vector<double> apply_filter(const std::vector<double>& g, const FilterSpec& spec) {
  switch (spec.kind) {
    case FilterSpec::Kind::none: return g;
    case FilterSpec::Kind::moving_average: return moving_average(g, spec.ma_base);
    case FilterSpec::Kind::fourier_lowpass: return fourier_lowpass(g, spec.fourier_cutoff);
  }
  return g;
}

void filter_cell_avg_with_boundary(GridFunction& g, const FilterSpec& spec) {
  if (g.placement != Placement::cell_with_boundary)
    throw std::invalid_argument("expected a boundary-carrying cell grid function");
  if (spec.kind == FilterSpec::Kind::none || g.size() <= 2) return;
  std::vector<double> interior(g.values.begin() + 1, g.values.end() - 1);
  interior = apply_filter(interior, spec);
  std::copy(interior.begin(), interior.end(), g.values.begin() + 1);
}

void filter_edge(GridFunction& g, const FilterSpec& spec) {
  if (g.placement != Placement::edge)
    throw std::invalid_argument("expected an edge grid function");
  if (spec.kind == FilterSpec::Kind::none) return;
  g.values = apply_filter(g.values, spec);
}

void apply_filter_pipeline(GridFunction* F_now, GridFunction& F_prev,
                           GridFunction& phi_prev, GridFunction& J_prev,
                           const FilterSpec& spec) {
  if (spec.kind == FilterSpec::Kind::none) return;
  if (F_now) filter_cell_avg_with_boundary(*F_now, spec);
  filter_cell_avg_with_boundary(F_prev, spec);
  filter_cell_avg_with_boundary(phi_prev, spec);
  filter_edge(J_prev, spec);
}

}  // namespace hww

#include "hww/tally.hpp"

#include <cmath>
#include <stdexcept>

namespace hww {

void TallySet::merge_from(const TallySet& other) {
  if (other.cells != cells || other.batches != batches)
    throw std::invalid_argument("tally merge shape mismatch");
  for (int i = 0; i < cells; ++i) {
    track_flux[i] += other.track_flux[i];
    census_phi[i] += other.census_phi[i];
    census_current[i] += other.census_current[i];
    census_closure[i] += other.census_closure[i];
  }
  for (std::size_t i = 0; i < track_flux_batch.size(); ++i)
    track_flux_batch[i] += other.track_flux_batch[i];
  for (int b = 0; b < batches; ++b)
    census_weight_batch[b] += other.census_weight_batch[b];
  for (int e = 0; e <= cells; ++e) edge_current[e] += other.edge_current[e];
  boundary_closure_left += other.boundary_closure_left;
  boundary_closure_right += other.boundary_closure_right;
  histories_scored += other.histories_scored;
  grazing_discarded += other.grazing_discarded;
}

namespace {

// Histories assigned to batch b under the contiguous-slice rule.
std::uint64_t batch_size(std::uint64_t histories, int batches, int b) {
  // history h belongs to batch h*B/H; batch b covers [ceil(bH/B), ceil((b+1)H/B)).
  const auto lo = (static_cast<std::uint64_t>(b) * histories + batches - 1) /
                  static_cast<std::uint64_t>(batches);
  const auto hi = (static_cast<std::uint64_t>(b + 1) * histories + batches - 1) /
                  static_cast<std::uint64_t>(batches);
  return hi - lo;
}

TallyReport means_only(const TallySet& ts, std::uint64_t histories,
                       double normalization) {
  TallyReport r;
  r.histories = histories;
  r.normalization = normalization;
  const double inv_h = 1.0 / normalization;
  r.phi_track.resize(ts.cells);
  r.phi_census.resize(ts.cells);
  r.current_census.resize(ts.cells);
  r.closure_census.resize(ts.cells);
  for (int i = 0; i < ts.cells; ++i) {
    r.phi_track[i] = ts.track_flux[i] * inv_h;
    r.phi_census[i] = ts.census_phi[i] * inv_h;
    r.current_census[i] = ts.census_current[i] * inv_h;
    r.closure_census[i] = ts.census_closure[i] * inv_h;
  }
  r.edge_current.resize(ts.cells + 1);
  for (int e = 0; e <= ts.cells; ++e) r.edge_current[e] = ts.edge_current[e] * inv_h;
  r.boundary_closure_left = ts.boundary_closure_left * inv_h;
  r.boundary_closure_right = ts.boundary_closure_right * inv_h;
  double cw = 0.0;
  for (double b : ts.census_weight_batch) cw += b;
  r.census_weight = cw * inv_h;
  return r;
}

}  // namespace

TallyReport finalize(const TallySet& ts, std::uint64_t histories,
                     double normalization) {
  if (histories == 0) throw std::invalid_argument("finalize needs histories >= 1");
  if (ts.histories_scored != histories)
    throw std::invalid_argument("finalize: histories_scored does not match");
  if (normalization <= 0.0) normalization = static_cast<double>(histories);

  TallyReport r = means_only(ts, histories, normalization);

  // Batch means live on the per-history scale; the reported sigma rescales
  // them onto the report scale.
  const double scale = static_cast<double>(histories) / normalization;
  const int B = ts.batches;
  r.phi_track_sigma.assign(ts.cells, 0.0);
  if (B >= 2 && histories >= static_cast<std::uint64_t>(B)) {
    r.sigma_valid = true;
    std::vector<double> inv_nb(B);
    for (int b = 0; b < B; ++b) {
      const auto nb = batch_size(histories, B, b);
      inv_nb[b] = nb ? 1.0 / static_cast<double>(nb) : 0.0;
    }
    const double inv_h = 1.0 / static_cast<double>(histories);
    for (int i = 0; i < ts.cells; ++i) {
      const double mean = ts.track_flux[i] * inv_h;
      double ss = 0.0;
      for (int b = 0; b < B; ++b) {
        const double bm = ts.track_flux_batch[static_cast<std::size_t>(b) * ts.cells + i] * inv_nb[b];
        const double d = bm - mean;
        ss += d * d;
      }
      r.phi_track_sigma[i] =
          scale * std::sqrt(ss / (static_cast<double>(B) * (B - 1)));
    }
    double wsum = 0.0;
    for (double b : ts.census_weight_batch) wsum += b;
    const double wmean = wsum * inv_h;
    double ss = 0.0;
    for (int b = 0; b < B; ++b) {
      const double bm = ts.census_weight_batch[b] * inv_nb[b];
      const double d = bm - wmean;
      ss += d * d;
    }
    r.census_weight_sigma =
        scale * std::sqrt(ss / (static_cast<double>(B) * (B - 1)));
  }
  return r;
}

TallyReport partial_snapshot(const TallySet& ts, std::uint64_t histories_so_far,
                             std::uint64_t histories_total, double normalization) {
  if (histories_so_far == 0)
    throw std::invalid_argument("partial snapshot needs histories >= 1");
  if (histories_total == 0) histories_total = histories_so_far;
  if (normalization <= 0.0) normalization = static_cast<double>(histories_total);
  // Unbiased estimate of the full step from the first H_p histories, on the
  // same scale the final report will use.
  const double effective =
      normalization * static_cast<double>(histories_so_far) /
      static_cast<double>(histories_total);
  return means_only(ts, histories_so_far, effective);
}

}  // namespace hww

#pragma once

#include <cstdint>
#include <vector>

namespace hww {

/// Accumulators for one time step: track-length flux (time+cell average),
/// census-crossing moments at the step end (cell average), and edge-crossing
/// currents (time average), plus per-batch partial sums for the variance of
/// the track-length flux and of the banked census weight.
///
/// A TallySet is single-writer. Workers own private sets and merge them in a
/// fixed order at barriers; merging is associative up to floating-point
/// summation order.
struct TallySet {
  int cells = 0;
  int batches = 0;

  std::vector<double> track_flux;           // I
  std::vector<double> track_flux_batch;     // batches * I
  std::vector<double> census_phi;           // I
  std::vector<double> census_current;       // I
  std::vector<double> census_closure;       // I, (1/3 - mu^2) moment
  std::vector<double> census_weight_batch;  // batches
  std::vector<double> edge_current;         // I + 1
  double boundary_closure_left = 0.0;       // P_L accumulator
  double boundary_closure_right = 0.0;      // P_R accumulator
  std::uint64_t histories_scored = 0;
  std::uint64_t grazing_discarded = 0;

  TallySet() = default;
  TallySet(int cells_, int batches_)
      : cells(cells_),
        batches(batches_),
        track_flux(cells_, 0.0),
        track_flux_batch(static_cast<std::size_t>(batches_) * cells_, 0.0),
        census_phi(cells_, 0.0),
        census_current(cells_, 0.0),
        census_closure(cells_, 0.0),
        census_weight_batch(batches_, 0.0),
        edge_current(cells_ + 1, 0.0) {}

  void merge_from(const TallySet& other);
};

/// Grazing-angle guard for the boundary-surface estimator.
inline constexpr double kGrazingMu = 1e-10;

/// Track-length score: w * length / (dx * dt) into cell and batch.
inline void score_track(TallySet& ts, int cell, double w, double length,
                        double inv_dx_dt, int batch) {
  const double c = w * length * inv_dx_dt;
  ts.track_flux[cell] += c;
  ts.track_flux_batch[static_cast<std::size_t>(batch) * ts.cells + cell] += c;
}

inline void score_track(TallySet& ts, int cell, double w, double length,
                        double dx, double dt, int batch) {
  score_track(ts, cell, w, length, 1.0 / (dx * dt), batch);
}

/// Census-crossing score at the step end: phi gets v*w/dx, the current
/// v*w*mu/dx, and the closure v*w*(1/3 - mu^2)/dx.
inline void score_census(TallySet& ts, int cell, double w, double mu,
                         double speed, double inv_dx, int batch) {
  const double base = speed * w * inv_dx;
  ts.census_phi[cell] += base;
  ts.census_current[cell] += base * mu;
  ts.census_closure[cell] += base * (1.0 / 3.0 - mu * mu);
  ts.census_weight_batch[batch] += w;
}

/// Edge-crossing score: signed current, plus the boundary closure term
/// w*(1/2 - |mu|)/|mu| on the domain boundaries. |mu| below the grazing
/// threshold is discarded from the boundary estimator and counted.
inline void score_edge_crossing(TallySet& ts, int edge, double w, double mu,
                                double inv_dt, bool domain_boundary) {
  ts.edge_current[edge] += (mu > 0 ? w : -w) * inv_dt;
  if (domain_boundary) {
    const double abs_mu = mu > 0 ? mu : -mu;
    if (abs_mu < kGrazingMu) {
      ++ts.grazing_discarded;
      return;
    }
    const double c = w * (0.5 - abs_mu) / abs_mu * inv_dt;
    if (edge == 0)
      ts.boundary_closure_left += c;
    else
      ts.boundary_closure_right += c;
  }
}

/// Per-source-history means (and the batch standard deviation of the mean
/// for the track-length flux). Immutable once built.
struct TallyReport {
  std::uint64_t histories = 0;
  double normalization = 0.0;  // source-history count the means divide by
  std::vector<double> phi_track;        // I
  std::vector<double> phi_track_sigma;  // I, batch std dev of the mean
  std::vector<double> phi_census;       // I
  std::vector<double> current_census;   // I
  std::vector<double> closure_census;   // I
  std::vector<double> edge_current;     // I + 1
  double boundary_closure_left = 0.0;
  double boundary_closure_right = 0.0;
  double census_weight = 0.0;        // total banked weight per history
  double census_weight_sigma = 0.0;  // batch std dev of the mean
  bool sigma_valid = false;
};

/// Final report: means = accumulators / normalization, sigma from B batch
/// means. Requires histories_scored == histories. The default normalization
/// is the history count itself; a run whose bank size differs from its
/// source-history count passes the source count to keep reports on the
/// per-source-history scale.
TallyReport finalize(const TallySet& ts, std::uint64_t histories,
                     double normalization = 0.0);

/// Mid-step snapshot normalized by the histories completed so far; no
/// variance. Never mutates the tally set. The optional pair
/// (histories_total, normalization) rescales the estimate onto the same
/// scale finalize would produce for the full step.
TallyReport partial_snapshot(const TallySet& ts, std::uint64_t histories_so_far,
                             std::uint64_t histories_total = 0,
                             double normalization = 0.0);

/// Batch index of a history: batches are contiguous, near-equal slices of
/// the step's histories, and a history's daughters stay in its batch.
inline int batch_of(std::uint64_t history, std::uint64_t histories_total, int batches) {
  if (histories_total == 0) return 0;
  auto b = static_cast<int>(history * static_cast<std::uint64_t>(batches) / histories_total);
  return b < batches ? b : batches - 1;
}

}  // namespace hww

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hww/material.hpp"
#include "hww/mesh.hpp"
#include "hww/particle.hpp"
#include "hww/rng.hpp"
#include "hww/tally.hpp"
#include "hww/ww.hpp"

namespace hww {

/// Isotropic point pulse: H particles at x0 with equal weights
/// total_weight/H and directions sampled uniformly on (-1,1).
ParticleBank sample_pulse_source(std::uint64_t histories, double x0,
                                 double total_weight, double t0, RngStream& rng);

/// Free-flight distance -ln(xi)/sigma_t.
double distance_to_collision(double sigma_t, RngStream& rng);

struct CollisionOutcome {
  enum class Kind { scatter, fission, capture } kind = Kind::capture;
  int secondaries = 0;  // fission only
};

/// Channel selection with probabilities sigma_s/sigma_t (scatter) and
/// sigma_f/sigma_t (fission); fission yields floor(nu_f) + Bernoulli
/// secondaries so the expected count is nu_f.
CollisionOutcome sample_collision(const Material& mat, RngStream& rng);

/// mu = 2*xi - 1.
double sample_isotropic_mu(RngStream& rng);

struct StepCounters {
  std::uint64_t collisions = 0;
  std::uint64_t splits = 0;
  std::uint64_t split_daughters = 0;
  std::uint64_t capped_splits = 0;
  std::uint64_t roulette_kills = 0;
  std::uint64_t roulette_survivals = 0;
  std::uint64_t census_count = 0;
  std::uint64_t event_cap_aborts = 0;
  std::uint64_t nan_aborts = 0;
  double leakage_weight = 0.0;
  double aborted_weight = 0.0;

  void merge_from(const StepCounters& o) {
    collisions += o.collisions;
    splits += o.splits;
    split_daughters += o.split_daughters;
    capped_splits += o.capped_splits;
    roulette_kills += o.roulette_kills;
    roulette_survivals += o.roulette_survivals;
    census_count += o.census_count;
    event_cap_aborts += o.event_cap_aborts;
    nan_aborts += o.nan_aborts;
    leakage_weight += o.leakage_weight;
    aborted_weight += o.aborted_weight;
  }
};

/// What one step of transport produced besides tallies: the census bank
/// (the next step's source, in deterministic emission order) and counters.
struct StepOutcome {
  ParticleBank census;
  StepCounters counters;
  std::vector<std::uint64_t> tracks_per_cell;

  explicit StepOutcome(int cells = 0) : tracks_per_cell(cells, 0) {}

  void merge_from(StepOutcome&& other) {
    census.insert(census.end(), other.census.begin(), other.census.end());
    counters.merge_from(other.counters);
    for (std::size_t i = 0; i < tracks_per_cell.size(); ++i)
      tracks_per_cell[i] += other.tracks_per_cell[i];
  }
};

/// Immutable per-step context shared by all histories.
struct StepContext {
  const Mesh1D* mesh = nullptr;
  const std::vector<Material>* materials = nullptr;  // one entry per cell
  double t_begin = 0.0;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  int step_index = 1;
  std::uint64_t histories_total = 0;  // for batch assignment
  int batches = 1;

  double dt() const { return t_end - t_begin; }
};

/// Safety cap on events per history (guards against runaway splitting).
inline constexpr std::uint64_t kMaxEventsPerHistory = 1'000'000;

/// Run one history: stream/collide/split/roulette until census, leakage, or
/// capture, scoring every traversed segment, edge crossing, and the census.
/// Daughters are processed depth-first within the same history.
void advance_history(const Particle& start, const StepContext& ctx,
                     const WeightWindowGrid* ww, TallySet& tallies,
                     StepOutcome& outcome, RngStream& flight, RngStream& window,
                     int batch);

/// Serial reference path: histories [h_begin, h_begin + source.size()) of the
/// step, scored into `tallies`/`outcome` in history order.
void run_segment_serial(const StepContext& ctx, std::span<const Particle> source,
                        std::uint64_t h_begin, const WeightWindowGrid* ww,
                        TallySet& tallies, StepOutcome& outcome);

/// OpenMP path: the segment is cut into fixed-size chunks processed in
/// parallel and merged in chunk order, so counters and the census bank are
/// identical to the serial path for any thread count; floating-point tallies
/// agree up to summation order.
void run_segment_parallel(const StepContext& ctx, std::span<const Particle> source,
                          std::uint64_t h_begin, const WeightWindowGrid* ww,
                          TallySet& tallies, StepOutcome& outcome,
                          int chunk_size = 256);

}  // namespace hww

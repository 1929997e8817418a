#include "hww/transport.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hww {

ParticleBank sample_pulse_source(std::uint64_t histories, double x0,
                                 double total_weight, double t0, RngStream& rng) {
  if (histories < 1) throw std::invalid_argument("pulse source needs H >= 1");
  ParticleBank bank;
  bank.reserve(histories);
  const double w = total_weight / static_cast<double>(histories);
  for (std::uint64_t h = 0; h < histories; ++h)
    bank.push_back(Particle{x0, rng.uniform_pm1(), w, t0});
  return bank;
}

double distance_to_collision(double sigma_t, RngStream& rng) {
  if (!(sigma_t > 0)) throw std::invalid_argument("sigma_t must be > 0");
  return -std::log(rng.uniform()) / sigma_t;
}

CollisionOutcome sample_collision(const Material& mat, RngStream& rng) {
  const double xi = rng.uniform() * mat.sigma_t;
  if (xi < mat.sigma_s) return {CollisionOutcome::Kind::scatter, 0};
  if (xi < mat.sigma_s + mat.sigma_f) {
    const double floor_nu = std::floor(mat.nu_f);
    const double frac = mat.nu_f - floor_nu;
    int n = static_cast<int>(floor_nu);
    if (frac > 0.0 && rng.uniform() < frac) ++n;
    return {CollisionOutcome::Kind::fission, n};
  }
  return {CollisionOutcome::Kind::capture, 0};
}

double sample_isotropic_mu(RngStream& rng) { return rng.uniform_pm1(); }

namespace {

struct StackEntry {
  Particle p;
  int cell;
};

// Weight-window game for a particle at a site. Returns false when the
// particle dies; a split leaves the survivor in `entry` and pushes the other
// daughters.
bool window_game(StackEntry& entry, const WeightWindowGrid& ww,
                 std::vector<StackEntry>& stack, RngStream& window_rng,
                 StepCounters& counters) {
  const WindowOutcome out = apply_window(entry.p.w, ww, entry.cell, window_rng);
  switch (out.action) {
    case WindowAction::unchanged:
      return true;
    case WindowAction::split:
      ++counters.splits;
      counters.split_daughters += static_cast<std::uint64_t>(out.daughters) - 1;
      if (out.capped) ++counters.capped_splits;
      entry.p.w = out.new_weight;
      for (int d = 1; d < out.daughters; ++d) stack.push_back(entry);
      return true;
    case WindowAction::roulette_survived:
      ++counters.roulette_survivals;
      entry.p.w = out.new_weight;
      return true;
    case WindowAction::roulette_killed:
      ++counters.roulette_kills;
      return false;
  }
  return true;
}

}  // namespace

void advance_history(const Particle& start, const StepContext& ctx,
                     const WeightWindowGrid* ww, TallySet& tallies,
                     StepOutcome& outcome, RngStream& flight, RngStream& window,
                     int batch) {
  const Mesh1D& mesh = *ctx.mesh;
  const std::vector<Material>& mats = *ctx.materials;
  const int last_cell = mesh.cells() - 1;
  const double inv_dt = 1.0 / ctx.dt();
  StepCounters& counters = outcome.counters;

  if (!std::isfinite(start.x) || !std::isfinite(start.w) || start.w <= 0.0) {
    ++counters.nan_aborts;
    return;
  }
  const auto start_cell = mesh.locate(start.x);
  if (!start_cell) throw std::invalid_argument("history starts outside the mesh");
  if (!(start.t >= ctx.t_begin && start.t < ctx.t_end))
    throw std::invalid_argument("history starts outside the time step");

  std::vector<StackEntry> stack;
  stack.push_back({start, *start_cell});
  std::uint64_t events = 0;

  while (!stack.empty()) {
    StackEntry entry = stack.back();
    stack.pop_back();
    Particle& p = entry.p;

    bool alive = true;
    while (alive) {
      if (++events > kMaxEventsPerHistory) {
        ++counters.event_cap_aborts;
        counters.aborted_weight += p.w;
        // Drop whatever remains of this history.
        for (const auto& e : stack) counters.aborted_weight += e.p.w;
        stack.clear();
        break;
      }

      const Material& mat = mats[entry.cell];
      const double inv_dx = 1.0 / mesh.width(entry.cell);

      const double d_census = mat.speed * (ctx.t_end - p.t);
      const double d_collision = distance_to_collision(mat.sigma_t, flight);
      double d_boundary = std::numeric_limits<double>::infinity();
      int crossing_edge = -1;
      if (p.mu > 0.0) {
        crossing_edge = entry.cell + 1;
        d_boundary = (mesh.edge(crossing_edge) - p.x) / p.mu;
      } else if (p.mu < 0.0) {
        crossing_edge = entry.cell;
        d_boundary = (mesh.edge(crossing_edge) - p.x) / p.mu;
      }

      const double d = std::min({d_census, d_collision, d_boundary});
      if (d > 0.0) {
        score_track(tallies, entry.cell, p.w, d, inv_dx * inv_dt, batch);
        ++outcome.tracks_per_cell[entry.cell];
      }

      if (d == d_census) {
        p.x += d * p.mu;
        p.t = ctx.t_end;
        score_census(tallies, entry.cell, p.w, p.mu, mat.speed, inv_dx, batch);
        ++counters.census_count;
        outcome.census.push_back(p);
        alive = false;
        continue;
      }

      if (d == d_boundary) {
        p.x = mesh.edge(crossing_edge);  // pin to the edge, no drift
        p.t += d / mat.speed;
        const bool domain_boundary = crossing_edge == 0 || crossing_edge == last_cell + 1;
        score_edge_crossing(tallies, crossing_edge, p.w, p.mu, inv_dt, domain_boundary);
        if (domain_boundary) {
          counters.leakage_weight += p.w;
          alive = false;
          continue;
        }
        entry.cell += p.mu > 0.0 ? 1 : -1;
        if (ww) alive = window_game(entry, *ww, stack, window, counters);
        continue;
      }

      // Collision.
      p.x += d * p.mu;
      p.t += d / mat.speed;
      ++counters.collisions;
      const CollisionOutcome collision = sample_collision(mat, flight);
      switch (collision.kind) {
        case CollisionOutcome::Kind::capture:
          alive = false;
          break;
        case CollisionOutcome::Kind::scatter:
          p.mu = sample_isotropic_mu(flight);
          if (ww) alive = window_game(entry, *ww, stack, window, counters);
          break;
        case CollisionOutcome::Kind::fission: {
          for (int s = 0; s < collision.secondaries; ++s) {
            StackEntry secondary = entry;
            secondary.p.mu = sample_isotropic_mu(flight);
            if (!ww || window_game(secondary, *ww, stack, window, counters))
              stack.push_back(secondary);
          }
          alive = false;
          break;
        }
      }
    }
  }
}

void run_segment_serial(const StepContext& ctx, std::span<const Particle> source,
                        std::uint64_t h_begin, const WeightWindowGrid* ww,
                        TallySet& tallies, StepOutcome& outcome) {
  for (std::size_t i = 0; i < source.size(); ++i) {
    const std::uint64_t h = h_begin + i;
    RngStream flight = spawn_stream(
        ctx.seed, stream_id(ctx.step_index, h, StreamPurpose::flight));
    RngStream window = spawn_stream(
        ctx.seed, stream_id(ctx.step_index, h, StreamPurpose::window));
    const int batch = batch_of(h, ctx.histories_total, ctx.batches);
    advance_history(source[i], ctx, ww, tallies, outcome, flight, window, batch);
    ++tallies.histories_scored;
  }
}

void run_segment_parallel(const StepContext& ctx, std::span<const Particle> source,
                          std::uint64_t h_begin, const WeightWindowGrid* ww,
                          TallySet& tallies, StepOutcome& outcome, int chunk_size) {
  if (chunk_size < 1) chunk_size = 1;
  const std::size_t n = source.size();
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  if (chunks <= 1) {
    run_segment_serial(ctx, source, h_begin, ww, tallies, outcome);
    return;
  }

  std::vector<TallySet> chunk_tallies(chunks);
  std::vector<StepOutcome> chunk_outcomes(chunks, StepOutcome(ctx.mesh->cells()));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * chunk_size;
    const std::size_t hi = std::min(lo + chunk_size, n);
    chunk_tallies[c] = TallySet(ctx.mesh->cells(), ctx.batches);
    run_segment_serial(ctx, source.subspan(lo, hi - lo), h_begin + lo, ww,
                       chunk_tallies[c], chunk_outcomes[c]);
  }

  // Merge in chunk order: deterministic for any thread count.
  for (std::size_t c = 0; c < chunks; ++c) {
    tallies.merge_from(chunk_tallies[c]);
    outcome.merge_from(std::move(chunk_outcomes[c]));
  }
}

}  // namespace hww

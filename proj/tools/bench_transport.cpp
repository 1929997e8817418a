// Compares the serial history loop against the chunked OpenMP path on one
// benchmark transport step and verifies they produce identical event counts
// and census banks.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hww/config.hpp"
#include "hww/driver.hpp"
#include "hww/transport.hpp"

namespace {

double now_seconds() {
  using Clock = std::chrono::steady_clock;
  static const Clock::time_point start = Clock::now();
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct TimedRun {
  double seconds = 0.0;
  hww::StepOutcome outcome;
  hww::TallySet tallies;
};

TimedRun run_once(const hww::StepContext& ctx, const hww::ParticleBank& bank,
                  const hww::WeightWindowGrid* ww, bool parallel) {
  TimedRun r;
  r.tallies = hww::TallySet(ctx.mesh->cells(), ctx.batches);
  r.outcome = hww::StepOutcome(ctx.mesh->cells());
  const double t0 = now_seconds();
  if (parallel)
    hww::run_segment_parallel(ctx, bank, 0, ww, r.tallies, r.outcome);
  else
    hww::run_segment_serial(ctx, bank, 0, ww, r.tallies, r.outcome);
  r.seconds = now_seconds() - t0;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t histories = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 100000;

  hww::RunConfig config = hww::RunConfig::benchmark();
  const hww::Mesh1D mesh = config.make_mesh();
  const std::vector<hww::Material> materials(mesh.cells(), config.material);

  hww::StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &materials;
  ctx.t_begin = 0.0;
  ctx.t_end = 1.0;
  ctx.seed = config.seed;
  ctx.step_index = 1;
  ctx.histories_total = histories;
  ctx.batches = config.batches;

  hww::RngStream src(config.seed, hww::stream_id(0, 0, hww::StreamPurpose::source));
  const hww::ParticleBank bank = hww::sample_pulse_source(
      histories, 0.0, static_cast<double>(histories), 0.0, src);

  // Flat windows exercise the window code path without changing physics.
  hww::WeightWindowGrid ww;
  ww.centers.assign(mesh.cells(), 1.0);
  ww.rho = config.rho;
  ww.eps_min = config.eps_min;

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif

  std::cout << "transport step benchmark: H = " << histories << ", threads = "
            << threads << "\n";
  std::cout << std::left << std::setw(22) << "path" << std::setw(12) << "seconds"
            << "histories/s\n";

  const TimedRun serial = run_once(ctx, bank, &ww, false);
  std::cout << std::left << std::setw(22) << "serial reference" << std::setw(12)
            << serial.seconds << static_cast<double>(histories) / serial.seconds
            << "\n";

  const TimedRun parallel = run_once(ctx, bank, &ww, true);
  std::cout << std::left << std::setw(22) << "openmp chunked" << std::setw(12)
            << parallel.seconds << static_cast<double>(histories) / parallel.seconds
            << "\n";

  std::cout << "speedup: " << serial.seconds / parallel.seconds << "x\n";

  // The two paths must agree exactly on events and banks.
  bool ok = serial.outcome.counters.collisions == parallel.outcome.counters.collisions &&
            serial.outcome.census.size() == parallel.outcome.census.size();
  if (ok) {
    for (std::size_t i = 0; i < serial.outcome.census.size(); ++i) {
      const auto& a = serial.outcome.census[i];
      const auto& b = parallel.outcome.census[i];
      if (a.x != b.x || a.mu != b.mu || a.w != b.w || a.t != b.t) {
        ok = false;
        break;
      }
    }
  }
  double max_rel = 0.0;
  for (int i = 0; i < mesh.cells(); ++i) {
    const double a = serial.tallies.track_flux[i];
    const double b = parallel.tallies.track_flux[i];
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale > 0.0) max_rel = std::max(max_rel, std::abs(a - b) / scale);
  }
  std::cout << "census banks identical: " << (ok ? "yes" : "NO") << "\n";
  std::cout << "max tally relative difference: " << max_rel << "\n";
  return ok && max_rel < 1e-12 ? 0 : 1;
}

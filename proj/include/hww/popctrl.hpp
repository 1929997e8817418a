#pragma once

#include <cstddef>

#include "hww/particle.hpp"
#include "hww/rng.hpp"

namespace hww {

struct CombResult {
  ParticleBank bank;
  std::size_t input_count = 0;
  std::size_t output_count = 0;
  double input_weight = 0.0;
  double output_weight = 0.0;
};

/// Uniform combing: teeth spaced W/target apart with a single random offset
/// walk the cumulative-weight axis of the bank in its deterministic order;
/// each tooth emits the covering particle with weight W/target. Preserves
/// total weight and yields exactly `target` particles, without weight bias.
CombResult uniform_comb(const ParticleBank& bank, std::size_t target, RngStream& rng);

}  // namespace hww

#pragma once

#include <vector>

namespace hww {

/// Monte Carlo particle: position [cm], direction cosine, statistical
/// weight, clock time [s].
struct Particle {
  double x = 0.0;
  double mu = 0.0;
  double w = 1.0;
  double t = 0.0;
};

using ParticleBank = std::vector<Particle>;

inline double total_weight(const ParticleBank& bank) {
  double w = 0.0;
  for (const auto& p : bank) w += p.w;
  return w;
}

}  // namespace hww

#pragma once

#include <array>
#include <cstdint>

namespace hww {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}

}  // namespace detail

/// Deterministic pseudo-random stream (xoshiro256**), fully determined by
/// (seed, stream_id). Every consumer owns its stream, so results do not
/// depend on thread count or scheduling.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * stream_id;
    for (auto& word : state_) word = detail::splitmix64(x);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  /// Uniform deviate strictly inside (0,1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform deviate on (-1,1).
  double uniform_pm1() { return 2.0 * uniform() - 1.0; }

 private:
  std::array<std::uint64_t, 4> state_;
};

/// Substream roles. Source sampling, in-flight physics, and window decisions
/// draw from separate substreams so that enabling weight windows does not
/// perturb the source particles shared across run modes.
enum class StreamPurpose : std::uint64_t {
  source = 0,
  flight = 1,
  window = 2,
  comb = 3,
};

/// Stream id for (time step, history, purpose). Histories fit in 40 bits,
/// steps in 16.
constexpr std::uint64_t stream_id(std::uint64_t step, std::uint64_t history,
                                  StreamPurpose purpose) {
  return (static_cast<std::uint64_t>(purpose) << 56) ^ (step << 40) ^ history;
}

inline RngStream spawn_stream(std::uint64_t seed, std::uint64_t id) {
  return RngStream(seed, id);
}

}  // namespace hww

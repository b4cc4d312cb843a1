#pragma once

#include <cstdint>

namespace tokenbal {

// Counter-based splittable pseudo-random streams. Every stream is keyed by
// (master seed, round, purpose), so the randomness of any single round can be
// replayed in isolation, independent of how many other rounds were consumed.

enum class StreamPurpose : std::uint64_t {
  matching = 1,     // random-matching edge picks
  orientation = 2,  // excess-token coin flips
  urn = 3,          // token partition shuffles
  init = 4,         // initial load vectors
  scatter = 5,      // leftover distribution in vertex-based diffusion
  flow = 6,         // edge-based flow rounding
  replica = 7,      // per-replica seed derivation
};

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t round, StreamPurpose purpose)
      : state_(mix64(mix64(mix64(master_seed + 0x9e3779b97f4a7c15ULL) ^
                           (round + 0xd1b54a32d192ed03ULL)) ^
                     (static_cast<std::uint64_t>(purpose) + 0x2545f4914f6cdd1dULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bool() { return (next_u64() & 1u) != 0; }

  // Unbiased uniform in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % bound;
  }

 private:
  std::uint64_t state_;
};

// Stable seed for replica `i` of a run seeded with `master`.
inline std::uint64_t derive_replica_seed(std::uint64_t master, std::uint64_t i) {
  return RngStream(master, i, StreamPurpose::replica).next_u64();
}

}  // namespace tokenbal

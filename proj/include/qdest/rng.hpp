#pragma once

#include <cstdint>
#include <random>

#include "qdest/special.hpp"

namespace qdest {

// SplitMix64 output scrambler; used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic stream-seed derivation: the value depends only on the
// arguments, never on execution order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (a + 0x9E3779B97F4A7C15ULL));
  h = splitmix64(h ^ (b + 0xC2B2AE3D27D4EB4FULL));
  return h;
}

// Seeded generator producing identical draws on every platform: uniforms map
// the top 53 bits of mt19937_64 output into the open interval (0, 1), and
// shaped draws go through explicit inverse CDFs rather than std
// distributions (whose output is implementation-defined).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() { return normal_quantile(uniform01()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qdest

#pragma once
//
// Portable seeded random source.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard.  The standard <random> distributions are not, so uniform,
// normal and bounded-integer draws are implemented here on top of the raw
// 64-bit words.
//
// Stream splitting: Rng(seed, stream) seeds the engine with
// splitmix64(seed ^ splitmix64(stream + 1)), so distinct (seed, stream)
// pairs give decorrelated, platform-independent sequences.
//

#include <cstddef>
#include <cstdint>
#include <random>

namespace valvefit {

// One step of the SplitMix64 finalizer.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller; the second variate is cached.
  double normal();
  // Uniform integer on [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace valvefit

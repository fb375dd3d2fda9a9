#pragma once

// Portable seeded random numbers.
//
// Generator: SplitMix64. The state is a 64-bit counter advanced by the
// golden-ratio increment 0x9E3779B97F4A7C15; each output is the counter passed
// through the SplitMix64 finalizer. Doubles take the top 53 bits:
// u = (x >> 11) * 2^-53, so u is in [0, 1). Nothing here depends on
// std::*_distribution, whose output differs across standard libraries.

#include <cstdint>

namespace pdelab {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Sub-seed for stream `index` of `master`; independent of evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64_mix(master ^ splitmix64_mix(index + 0x9E3779B97F4A7C15ULL));
}

class Rng {
 public:
  static constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ULL;

  explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    state_ += kIncrement;
    return splitmix64_mix(state_);
  }

  /// Uniform on [0, 1).
  constexpr double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, bound) by rejection; bound must be > 0.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

}  // namespace pdelab

#pragma once

#include <cstdint>

namespace nnmc {

/// SplitMix64 stream with explicit seeding. Parallel trials derive their
/// stream as `Rng(Rng::derive(seed, trial_index))`; results are therefore
/// identical for any worker count, platform, and standard library.
///
/// Uniform and normal draws are generated in-house (Lemire-style rejection,
/// Box-Muller) so sequences are bit-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Stream rule for trial k of a run seeded with `seed`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return seed ^ index;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1), 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, bound); bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

  /// Standard normal deviate.
  double next_normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nnmc

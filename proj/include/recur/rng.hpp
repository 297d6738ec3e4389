#pragma once

#include <cstdint>
#include <random>

namespace recur {

/// Seedable, splittable generator. Streams derived from distinct
/// (seed, index) pairs are statistically independent for practical purposes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  /// Independent child stream for parallel task `index`.
  Rng split(std::uint64_t index) const { return Rng(mix(seed_ ^ mix(index + 0x632be59bd9b4e019ULL))); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace recur

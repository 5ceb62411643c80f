#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "vpd/text.hpp"

namespace vpd {

/// Seeded generator with platform-independent draws. The standard
/// distributions are implementation-defined, so the helpers below derive
/// values from raw 64-bit outputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream derived from a seed and a label such as a record id.
  static Rng derived(std::uint64_t seed, std::string_view label) {
    return Rng(seed ^ (text::fnv1a64(label) * 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform real in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vpd

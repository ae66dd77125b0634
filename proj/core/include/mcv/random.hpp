#pragma once

#include <cstdint>
#include <random>

namespace mcv {

/// Deterministic generator used everywhere randomness enters a result.
///
/// The engine is std::mt19937_64 (bit-exact across standard libraries). Bounded
/// integers use rejection sampling on the raw 64-bit output and reals use the top
/// 53 bits, so sequences do not depend on the library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = -n % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= limit) return r % n;
    }
  }

  /// Uniform real in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mcv

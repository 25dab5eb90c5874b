#pragma once

/**
 * @file randomgen.hpp
 * @brief Deterministic, platform-independent random value generators.
 *
 * std::uniform_int_distribution is implementation-defined, so the bounded
 * samplers here are written out explicitly on top of std::mt19937_64 (whose
 * output sequence the standard pins down).  Given the same seed, every
 * platform draws the same values -- the `verify` CLI suites depend on that
 * for byte-identical output.
 */

#include "krt/nat.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace krt {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform value in [0, bound) for bound >= 1 (rejection sampling).
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    for (;;) {
      const std::uint64_t r = engine_();
      if (r < limit) return r % bound;
    }
  }

  /// Uniform value in [lo, hi] inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  bool coin() { return (engine_() & 1u) != 0; }

  /// Nat with exactly `bits` binary digits (leading digit forced to 1).
  Nat nat_with_bits(std::size_t bits) {
    if (bits == 0) return Nat(0);
    Nat v = 1;
    for (std::size_t i = 1; i < bits; ++i) {
      v <<= 1;
      if (coin()) v += 1;
    }
    return v;
  }

  /// Nat whose bit-length is uniform in [1, max_bits] (skewed toward small
  /// magnitudes, which is what coding round-trip tests want).
  Nat nat_up_to_bits(std::size_t max_bits) {
    const std::size_t bits = static_cast<std::size_t>(between(1, max_bits));
    if (bits == 1) return Nat(below(2));
    return nat_with_bits(bits);
  }

  /// Uniform Nat in [0, bound) for an arbitrary-precision bound >= 1.
  Nat nat_below(const Nat& bound) {
    if (bound <= 1) return Nat(0);
    const std::size_t bits = bitlen_sz(Nat(bound - 1));
    for (;;) {
      Nat v = 0;
      for (std::size_t i = 0; i < bits; ++i) {
        v <<= 1;
        if (coin()) v += 1;
      }
      if (v < bound) return v;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace krt

/// Seedable random streams with explicit stream splitting.
///
/// Every consumer of randomness (a trial, a sender's encoder, the channel,
/// the permutation block) gets its own child stream derived from a master
/// seed and an integer path.  Results are therefore bitwise reproducible for
/// a fixed master seed regardless of scheduling or worker count, and
/// individual trials can be replayed in isolation.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pamac {

/// SplitMix64 step; used both as a tiny RNG and as the mixing function for
/// deriving child-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a master seed and up to three path components.
/// Mixing is sequential, so (seed, a, b, c) and (seed, a', b, c) differ in
/// every bit with overwhelming probability.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t s = master;
  s ^= splitmix64(a);
  std::uint64_t t = splitmix64(s);
  s = t ^ splitmix64(b);
  t = splitmix64(s);
  s = t ^ splitmix64(c);
  return splitmix64(s);
}

/// Deterministic random stream.  Wraps std::mt19937_64 (whose output sequence
/// is fully specified by the standard) and exposes only explicitly-defined
/// derivations — no std::uniform_*_distribution, whose outputs are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, bound) via rejection sampling.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    // Smallest power-of-two mask covering bound.
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      const std::uint64_t v = engine_() & mask;
      if (v < bound) return v;
    }
  }

  /// Bernoulli draw: 1 with probability prob.
  int bernoulli(double prob) { return uniform01() < prob ? 1 : 0; }

  /// Inverse-CDF draw from a categorical distribution given its cumulative
  /// sums (cdf.back() is expected to be ~1; the last bucket absorbs slack).
  int categorical_from_cdf(const std::vector<double>& cdf) {
    const double u = uniform01();
    const int k = static_cast<int>(cdf.size());
    for (int i = 0; i < k - 1; ++i) {
      if (u < cdf[static_cast<std::size_t>(i)]) return i;
    }
    return k - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pamac

#pragma once

#include <cstdint>

namespace graphconc {

/// Identifies one reproducible random stream: a run-wide master seed plus a
/// per-trial stream index.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the value at counter c is a pure function of
/// (master_seed, stream_index, c). Draws are order independent, so a sampler
/// can evaluate them in any order or in parallel and get identical results.
///
/// The algorithm is fixed: key = mix64(mix64(seed ^ K1) ^ (stream * K2 + K3)),
/// word(c) = mix64(key + (c + 1) * K4), with the SplitMix64 constants below.
/// Only integer arithmetic is involved, so results are bit-identical on every
/// platform.
class CounterRng {
 public:
  explicit constexpr CounterRng(SeedSpec seed)
      : key_(mix64(mix64(seed.master_seed ^ 0x6a09e667f3bcc908ULL) ^
                   (seed.stream_index * 0x9e3779b97f4a7c15ULL + 0xbb67ae8584caa73bULL))) {}

  constexpr std::uint64_t word(std::uint64_t counter) const {
    return mix64(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
  }

  /// Bernoulli(p) draw at `counter`. Compares the 53-bit integer draw against
  /// floor(p * 2^53), so p = 0 never fires and p = 1 always fires.
  constexpr bool bernoulli(std::uint64_t counter, double p) const {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    const auto threshold = static_cast<std::uint64_t>(p * 0x1.0p53);
    return (word(counter) >> 11) < threshold;
  }

  /// Derived stream for auxiliary randomness (start vectors, sign trials).
  constexpr CounterRng substream(std::uint64_t tag) const {
    CounterRng out = *this;
    out.key_ = mix64(key_ ^ mix64(tag + 0x3c6ef372fe94f82bULL));
    return out;
  }

 private:
  std::uint64_t key_;
};

/// Standard normal draw from two counter words (Box-Muller, cosine branch).
double normal_draw(const CounterRng& rng, std::uint64_t counter);

}  // namespace graphconc

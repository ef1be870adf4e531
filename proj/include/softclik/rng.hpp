#pragma once

#include <cstdint>

namespace softclik {

/// Counter-based pseudo-random generator (SplitMix64 over an incrementing
/// counter). The sequence is a pure function of (seed, draw index), so
/// parallel consumers that derive one stream per work item stay reproducible
/// for any worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  /// Independent stream for work item `stream` (sample i uses seed ^ i).
  static Rng stream(std::uint64_t seed, std::uint64_t stream_index) {
    return Rng(seed ^ stream_index);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n). Fixed-point multiply keeps it deterministic
  /// and avoids the modulo path.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

/// Stable 64-bit mix of two values; used to derive sub-seeds (per-epoch
/// shuffles, split permutations) from one user seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace softclik

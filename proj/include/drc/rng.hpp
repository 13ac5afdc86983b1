#pragma once

// Seedable random streams. Every consumer derives its own stream from
// (seed, purpose, indices) so that resampling one component never shifts
// the draws of another.

#include <cstdint>
#include <limits>

namespace drc {

enum class Stream : std::uint64_t {
  kStrengthMean = 1,
  kStrengthPath = 2,
  kEdgeProbability = 3,
  kGraph = 4,
  kOutcome = 5,
  kLoocv = 6,
  kCell = 7,
  kFuzz = 8,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic key for a substream.
std::uint64_t derive_seed(std::uint64_t seed, Stream purpose, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0);

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}

  static Rng stream(std::uint64_t seed, Stream purpose, std::uint64_t a = 0,
                    std::uint64_t b = 0, std::uint64_t c = 0) {
    return Rng(derive_seed(seed, purpose, a, b, c));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  /// SplitMix64: output k is mix64(key + k * golden), a counter-based stream.
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return finalize(state_);
  }

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Marsaglia polar method).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace drc

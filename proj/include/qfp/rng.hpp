#pragma once

#include <cstdint>

namespace qfp {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Substream seed for trial `index` under `master_seed`:
//   mix64(s, i) = finalize(s ^ finalize(i + gamma))
// Every randomized operation derives per-trial streams this way, so results
// do not depend on how trials are split across worker threads.
constexpr std::uint64_t mix64(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64_finalize(master_seed ^ splitmix64_finalize(index + kGoldenGamma));
}

// SplitMix64 stream. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RandomStream(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  constexpr result_type operator()() {
    state_ += kGoldenGamma;
    return splitmix64_finalize(state_);
  }

  // Uniform double in [0, 1) built from the top 53 bits.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

}  // namespace qfp

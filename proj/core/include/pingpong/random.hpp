#pragma once

#include <cstdint>
#include <random>

namespace pingpong {

/// Seeded source of uniform variates. Every random decision in the library
/// goes through one of these, so a seed fully determines a run.
///
/// Doubles are built from the top 53 bits of a 64-bit Mersenne Twister draw
/// rather than std::uniform_real_distribution, whose output is not specified
/// identically across standard libraries.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform();

  /// True with probability p.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pingpong

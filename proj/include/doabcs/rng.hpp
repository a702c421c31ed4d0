#pragma once

// Seedable generator with a bit-stable stream: xoshiro256++ seeded through
// splitmix64, Gaussian draws via Box-Muller. std::normal_distribution is
// deliberately avoided because its draw sequence is not pinned by the
// standard, and reproducibility of every benchmark rests on this stream.

#include <cstdint>

namespace doabcs {

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01();

  // Uniform integer in [lo, hi], inclusive; debiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // N(mean, stddev^2); consumes two uniforms per pair of draws.
  double normal(double mean = 0.0, double stddev = 1.0);

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace doabcs

#pragma once
// Deterministic random number generation. xoshiro256++ core with splitmix64
// seeding; every distribution is hand-rolled so that a (seed, stream) pair
// produces identical draws on any platform and standard library.

#include <cstdint>
#include <span>

namespace bimt {

class Rng {
 public:
  explicit Rng(uint64_t seed);

  // Independent stream for replicate `stream_id` of a master seed. Streams
  // are what the CLI hands to parallel workers: replicate i always sees the
  // same draws no matter how work is scheduled.
  static Rng stream(uint64_t seed, uint64_t stream_id);

  uint64_t next_u64();
  double uniform01();       // [0, 1)
  double uniform01_pos();   // (0, 1]
  double uniform(double a, double b);
  double exponential(double rate);  // rate > 0
  uint64_t below(uint64_t n);       // uniform on {0, ..., n-1}, unbiased
  long poisson(double lambda);

  // Index sampled proportionally to weights[i]; total = sum of weights > 0.
  size_t discrete(std::span<const double> weights, double total);
  // Index from a nondecreasing cdf (unnormalized); binary search.
  size_t discrete_cdf(std::span<const double> cdf);

 private:
  uint64_t s_[4];
  long poisson_small(double lambda);
};

}  // namespace bimt

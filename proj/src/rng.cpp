#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bimt {

namespace {

inline uint64_t splitmix64(uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) {
  uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
  // xoshiro must not start in the all-zero state
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x853C49E6748FEA9BULL;
}

Rng Rng::stream(uint64_t seed, uint64_t stream_id) {
  uint64_t x = seed;
  uint64_t base = splitmix64(x);
  uint64_t y = base ^ (0xD1342543DE82EF95ULL * (stream_id + 1));
  Rng r(0);
  for (auto& s : r.s_) s = splitmix64(y);
  if ((r.s_[0] | r.s_[1] | r.s_[2] | r.s_[3]) == 0) r.s_[0] = 0x853C49E6748FEA9BULL;
  return r;
}

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform01_pos() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
  return -std::log(uniform01_pos()) / rate;
}

uint64_t Rng::below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("below: n must be > 0");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

long Rng::poisson_small(double lambda) {
  // product-of-uniforms inversion; exact for moderate lambda
  const double L = std::exp(-lambda);
  long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform01_pos();
  } while (p > L);
  return k - 1;
}

long Rng::poisson(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("poisson: lambda must be >= 0");
  if (lambda == 0.0) return 0;
  if (lambda <= 30.0) return poisson_small(lambda);
  // split into independent pieces; sums of Poissons are Poisson, so this is
  // exact (if slow for huge lambda, which desk-scale runs never reach)
  long chunks = static_cast<long>(std::ceil(lambda / 30.0));
  double piece = lambda / static_cast<double>(chunks);
  long total = 0;
  for (long i = 0; i < chunks; ++i) total += poisson_small(piece);
  return total;
}

size_t Rng::discrete(std::span<const double> weights, double total) {
  if (!(total > 0.0)) throw std::invalid_argument("discrete: total weight must be > 0");
  double u = uniform01() * total;
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // floating roundoff at the very top: return last positive weight
  for (size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  throw std::invalid_argument("discrete: no positive weight");
}

size_t Rng::discrete_cdf(std::span<const double> cdf) {
  if (cdf.empty() || !(cdf.back() > 0.0))
    throw std::invalid_argument("discrete_cdf: empty or zero-mass cdf");
  double u = uniform01() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<size_t>(it - cdf.begin());
}

}  // namespace bimt

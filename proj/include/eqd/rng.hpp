#pragma once
// Seeded random streams. Every consumer derives a named sub-stream from the
// run seed so that adding a consumer never perturbs the others.

#include <cstdint>
#include <random>
#include <string_view>

namespace eqd {

uint64_t splitmix64(uint64_t x);
uint64_t substream_seed(uint64_t seed, std::string_view name);

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  Rng(uint64_t seed, std::string_view stream) : eng_(substream_seed(seed, stream)) {}

  uint64_t next() { return eng_(); }
  // Uniform in [0,1) with 53 random bits; platform independent.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [lo, hi], inclusive.
  int64_t range(int64_t lo, int64_t hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<int64_t>(eng_());
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do x = eng_();
    while (x >= limit);
    return lo + static_cast<int64_t>(x % span);
  }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace eqd

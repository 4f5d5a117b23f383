#pragma once

#include <cmath>
#include <cstdint>

namespace eventsum {

/// xoshiro256** 1.0 (Blackman / Vigna, public domain reference constants),
/// seeded from a single 64-bit value via splitmix64. Fixed here so that
/// generated corpora are reproducible bit-for-bit from the seed alone,
/// independent of standard-library implementation or language.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    // splitmix64: z = (s += 0x9E3779B97F4A7C15); mixed twice with
    // 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, shifts 30/27/31.
    std::uint64_t z = seed;
    for (auto& word : state_) {
      z += 0x9E3779B97F4A7C15ULL;
      std::uint64_t x = z;
      x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
      x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
      word = x ^ (x >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) using the top 53 bits: (next() >> 11) * 2^-53.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Convention: floor(next_double() * n),
  /// clamped to n - 1; kept deliberately simple so other implementations
  /// can reproduce the stream.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) return 0;
    auto v = static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
    return v >= n ? n - 1 : v;
  }

  /// Poisson sample by inverse-CDF walk: draw u, accumulate pmf terms
  /// p(k+1) = p(k) * lambda / (k+1) starting from p(0) = exp(-lambda)
  /// until the running sum exceeds u.
  int poisson(double lambda) {
    if (lambda <= 0) return 0;
    const double u = next_double();
    double p = std::exp(-lambda);
    double cdf = p;
    int k = 0;
    const int cap = static_cast<int>(lambda + 60.0 * std::sqrt(lambda) + 100.0);
    while (cdf <= u && k < cap) {
      ++k;
      p *= lambda / k;
      cdf += p;
    }
    return k;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace eventsum

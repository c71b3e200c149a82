#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace tavc {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the i-th output of stream (seed, stream) is
// mix(key + i * golden) with key = mix(seed, stream). Streams are independent
// functions of their id, so replication r gets the same numbers whichever
// thread runs it. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64_mix(splitmix64_mix(seed + kGolden) ^ splitmix64_mix(stream * 0xD1B54A32D192ED03ULL + 1))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return splitmix64_mix(key_ + (++counter_) * kGolden); }

  // Uniform on (0, 1]: never returns 0, so log() is safe.
  double uniform_pos() { return static_cast<double>((operator()() >> 11) + 1) * 0x1.0p-53; }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Standard normal variates by Marsaglia's polar method (exact, rejection
// based); the second variate of each accepted pair is cached.
class NormalSource {
 public:
  double operator()(CounterRng& rng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * rng.uniform() - 1.0;
      v = 2.0 * rng.uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tavc

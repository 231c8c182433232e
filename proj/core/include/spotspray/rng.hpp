#pragma once

#include <cmath>
#include <cstdint>

#include "spotspray/errors.hpp"

namespace spotspray {

namespace detail {

// SplitMix64 finalizer: bijective 64-bit mix with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

// Counter-based splittable pseudo-random stream.
//
// output_i = mix64(key + (i+1)*gamma), i.e. SplitMix64 with the key as the
// initial state. Streams are cheap to fork: substream(id) hashes (key, id)
// into a fresh key, so every (trial, strip, lane, purpose) tuple can own an
// independent stream and the draw sequence of one consumer never shifts when
// another consumer draws more or less. Identical seeds give identical
// sequences on every platform; no wall-clock state anywhere.
class RngStream {
 public:
  RngStream() = default;

  static RngStream from_seed(std::uint64_t seed) {
    RngStream s;
    s.key_ = detail::mix64(seed + detail::kGoldenGamma);
    return s;
  }

  // Independent child stream; distinct ids give decorrelated keys.
  RngStream substream(std::uint64_t id) const {
    RngStream s;
    s.key_ = detail::mix64(key_ ^ detail::mix64((id + 1) * detail::kGoldenGamma));
    return s;
  }

  std::uint64_t next_u64() {
    counter_ += 1;
    return detail::mix64(key_ + counter_ * detail::kGoldenGamma);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    if (!(lo <= hi)) throw DomainError("uniform: lo must be <= hi");
    return lo + (hi - lo) * uniform01();
  }

  bool bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernoulli: p must be in [0, 1]");
    return uniform01() < p;
  }

  // Box-Muller transform; consumes exactly two uniforms per call.
  double normal(double mean, double sd) {
    if (!(sd >= 0.0)) throw DomainError("normal: sd must be >= 0");
    const double u1 = 1.0 - uniform01();  // (0, 1]; keeps log() finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Normal(mean, sd) conditioned on the result being >= 0, via rejection.
  // Callers use this for stage latencies whose means sit many sds above zero,
  // so the acceptance probability is ~1 and rejection is the exact and cheap
  // choice.
  double truncated_normal_nonneg(double mean, double sd) {
    if (!(sd >= 0.0)) throw DomainError("truncated_normal_nonneg: sd must be >= 0");
    if (sd == 0.0) {
      if (mean < 0.0) throw DomainError("truncated_normal_nonneg: sd 0 with negative mean");
      return mean;
    }
    for (int attempt = 0; attempt < 100000; ++attempt) {
      const double x = normal(mean, sd);
      if (x >= 0.0) return x;
    }
    throw DomainError("truncated_normal_nonneg: acceptance region negligible");
  }

  // Knuth multiplication method, exact for any mean. Means above 500 are
  // consumed in chunks so exp(-chunk) stays comfortably inside double range;
  // Poisson(a + b) = Poisson(a) + Poisson(b) for independent draws.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw DomainError("poisson: mean must be >= 0");
    std::uint64_t total = 0;
    double remaining = mean;
    while (remaining > 0.0) {
      const double chunk = remaining > 500.0 ? 500.0 : remaining;
      remaining -= chunk;
      const double limit = std::exp(-chunk);
      double prod = uniform01();
      while (prod > limit) {
        total += 1;
        prod *= uniform01();
      }
    }
    return total;
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace spotspray

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>

namespace scalekit {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20240229;

/// SCALEKIT_SEED, when set to an integer, overrides the given seed.
inline std::uint64_t resolve_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("SCALEKIT_SEED")) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
  }
  return seed;
}

/// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
inline std::complex<double> complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace scalekit

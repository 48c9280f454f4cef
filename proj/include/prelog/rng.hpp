#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace prelog {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; maps (seed, stream) to a well-mixed child seed so
/// per-chunk streams do not depend on how work is split across threads.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Circularly-symmetric complex Gaussian with unit variance.
inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Circularly-symmetric complex Gaussian with unit variance. |Z|^2 is
/// Exp(1) and the phase is uniform, which gives both components at once.
inline std::complex<double> complex_normal(Rng& rng) {
  const double radius = std::sqrt(-std::log(1.0 - uniform01(rng)));
  const double turns = uniform01(rng);
  return {radius * std::cos(2.0 * std::numbers::pi * turns),
          radius * std::sin(2.0 * std::numbers::pi * turns)};
}

}  // namespace prelog

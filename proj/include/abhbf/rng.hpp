// SPDX-License-Identifier: Apache-2.0
//
// Seeded random stream with fully pinned draw algorithms. The engine is
// std::mt19937_64 (bit-exact per the standard); the uniform and Gaussian
// transforms are spelled out here instead of using std::*_distribution,
// whose algorithms are implementation-defined and would break byte-stable
// reproducibility across toolchains.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace abhbf {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Independent per-trial substream: trial t of base seed s is seeded with
  // splitmix64(s + t * golden), so trials can run in parallel and still
  // reproduce the serial byte stream.
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base + index * 0x9E3779B97F4A7C15ULL);
  }
  static RandomStream for_trial(std::uint64_t base, std::uint64_t index) {
    return RandomStream(derive_seed(base, index));
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Standard normal via Box-Muller; draws exactly two uniforms per call.
  double gaussian() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Circularly-symmetric complex Gaussian, unit variance per complex sample.
  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace abhbf

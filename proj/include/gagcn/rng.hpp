// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace gagcn {

/// Counter-based pseudo-random generator. Draw k is a pure function of
/// (seed, k), so a given seed produces the same u64 stream on every platform,
/// and named substreams can be split off without consuming draws.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    ctr_ += 1;
    return mix64(seed_ + ctr_ * kGamma);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; two draws per value.
  double normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Independent child stream derived from the seed and a key. Splitting does
  /// not depend on how many draws this stream has produced.
  Rng split(std::string_view key) const {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (const char c : key) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001B3ull;
    }
    return Rng(mix64(seed_ ^ h));
  }

  Rng split(std::uint64_t key) const { return Rng(mix64(seed_ ^ mix64(key + kGamma))); }

private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_ = 0;
  std::uint64_t ctr_ = 0;
};

}  // namespace gagcn

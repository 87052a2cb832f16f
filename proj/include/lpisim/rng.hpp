#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "lpisim/types.hpp"

namespace lpisim::rng {

// Tags naming the independent draw streams derived from a user seed.  Keeping
// the streams separate means e.g. adding noise never shifts the payload bits.
inline constexpr std::uint64_t kPilotStream = 1;
inline constexpr std::uint64_t kDataStream = 2;
inline constexpr std::uint64_t kSecretPhaseStream = 3;
inline constexpr std::uint64_t kSecretDopplerStream = 4;
inline constexpr std::uint64_t kNoiseStream = 5;

/// One splitmix64 scrambling round (Steele/Lea/Flood finalizer).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seed for the sub-stream `tag` of a base seed.  Distinct tags give
/// decorrelated engines even for adjacent base seeds.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

/// Deterministic random stream.
///
/// std::mt19937_64's bit output is pinned by the C++ standard, but the
/// standard *distributions* are not; the mappings below replace them so the
/// same seed yields the same values on every compiler and platform.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform on (-pi, pi]; u = 0 maps to +pi, keeping -pi excluded.
  double phase() { return kPi - kTwoPi * uniform01(); }

  /// One standard-normal pair via Box-Muller, two uniforms per pair in a
  /// fixed draw order.  log1p(-u) keeps the argument of log away from 0.
  std::pair<double, double> normal_pair() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double th = kTwoPi * u2;
    return {r * std::cos(th), r * std::sin(th)};
  }

  /// Two random bits (QPSK constellation index).
  unsigned bits2() { return static_cast<unsigned>(raw() >> 62); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lpisim::rng

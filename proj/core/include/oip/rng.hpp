#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace oip {

// Counter-based deterministic randomness. Every mock draw is keyed by the
// full administration coordinates, so replays are byte-identical and
// independent of call order.

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Accumulates key material; every mixed-in token permutes the state.
class StreamKey {
 public:
  explicit StreamKey(uint64_t seed) : state_(splitmix64(seed ^ 0x6f69706861726eULL)) {}

  StreamKey& mix(uint64_t v) {
    state_ = splitmix64(state_ ^ v);
    return *this;
  }
  StreamKey& mix(std::string_view s) { return mix(fnv1a64(s)); }

  uint64_t value() const { return state_; }

  /// n-th 64-bit word of this stream.
  uint64_t word(uint64_t n) const { return splitmix64(state_ + 0x9e3779b97f4a7c15ULL * (n + 1)); }

  /// Uniform double in [0, 1).
  double uniform(uint64_t n) const {
    return static_cast<double>(word(n) >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on words (2n, 2n+1).
  double normal(uint64_t n) const {
    double u1 = uniform(2 * n);
    double u2 = uniform(2 * n + 1);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  uint64_t state_;
};

}  // namespace oip

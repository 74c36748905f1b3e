#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace stosis {

// SplitMix64 finalizer, used to key per-trajectory streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Standard-normal stream keyed by (master_seed, stream_index). Each
/// trajectory owns one stream, so results do not depend on scheduling order.
/// Draws are Box-Muller on explicit 53-bit uniforms: the sequence is fully
/// determined by the key, independent of the C++ library implementation.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : eng_(mix64(mix64(master_seed) + stream_index)) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = ((eng_() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    const double u2 = (eng_() >> 11) * 0x1.0p-53;        // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace stosis

#pragma once

// Counter-based Gaussian streams. Every Brownian increment is a pure
// function of (seed, stream, step), so paths are reproducible bit-for-bit no
// matter which thread computes them or in which order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace spinsde {

/// Philox4x32-10 block cipher (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter encrypt(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Stream roles keep independent uses of one seed apart.
enum class StreamRole : std::uint32_t {
  Brownian = 1,
  Oracle = 2,
};

/// SplitMix64 finalizer; derives per-path seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Standard normal 3-vectors indexed by step number.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, StreamRole role, std::uint32_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        role_(static_cast<std::uint32_t>(role)),
        stream_(stream) {}

  Eigen::Vector3d normal3(std::uint64_t step) const {
    const auto a = block(step, 0);
    const auto b = block(step, 1);
    // Two Box-Muller pairs from four 53-bit uniforms; the fourth normal is dropped.
    const double r0 = std::sqrt(-2.0 * std::log(uniform(a[0], a[1])));
    const double th0 = 2.0 * std::numbers::pi * uniform(a[2], a[3]);
    const double r1 = std::sqrt(-2.0 * std::log(uniform(b[0], b[1])));
    const double th1 = 2.0 * std::numbers::pi * uniform(b[2], b[3]);
    return {r0 * std::cos(th0), r0 * std::sin(th0), r1 * std::cos(th1)};
  }

 private:
  Philox4x32::Counter block(std::uint64_t step, std::uint32_t sub) const {
    const auto lo = static_cast<std::uint32_t>(step);
    const auto hi = static_cast<std::uint32_t>(step >> 32);
    return Philox4x32::encrypt({lo, (hi << 1) | sub, stream_, role_}, key_);
  }

  // Uniform on the open interval (0, 1).
  static double uniform(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint32_t role_;
  std::uint32_t stream_;
};

}  // namespace spinsde

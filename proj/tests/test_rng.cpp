#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spinsde/rng.hpp"

using namespace spinsde;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  const auto zero = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
  CHECK(zero == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const auto ones = Philox4x32::encrypt({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
  CHECK(ones == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const auto pi = Philox4x32::encrypt({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                      {0xa4093822u, 0x299f31d0u});
  CHECK(pi == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("Gaussian stream is a pure function of (seed, role, stream, step)") {
  const GaussianStream a(42, StreamRole::Brownian);
  const GaussianStream b(42, StreamRole::Brownian);
  for (std::uint64_t n : {0ull, 1ull, 1000ull, (1ull << 33) + 5}) {
    CHECK(a.normal3(n) == b.normal3(n));
  }
  CHECK(a.normal3(7) != GaussianStream(43, StreamRole::Brownian).normal3(7));
  CHECK(a.normal3(7) != GaussianStream(42, StreamRole::Oracle).normal3(7));
  CHECK(a.normal3(7) != GaussianStream(42, StreamRole::Brownian, 1).normal3(7));
  CHECK(a.normal3(7) != a.normal3(8));
}

TEST_CASE("Gaussian stream moments") {
  const GaussianStream g(2024, StreamRole::Brownian);
  constexpr int n = 200000;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
  double fourth = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d z = g.normal3(static_cast<std::uint64_t>(i));
    sum += z;
    second += z * z.transpose();
    fourth += std::pow(z(0), 4);
  }
  const Eigen::Vector3d mean = sum / n;
  const Eigen::Matrix3d cov = second / n;
  // 5 standard errors
  CHECK(mean.cwiseAbs().maxCoeff() < 5.0 / std::sqrt(n));
  CHECK((cov - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(fourth / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("mix_seed separates nearby indices") {
  CHECK(mix_seed(0, 0) != mix_seed(0, 1));
  CHECK(mix_seed(0, 1) != mix_seed(1, 0));
  CHECK(mix_seed(5, 3) == mix_seed(5, 3));
}

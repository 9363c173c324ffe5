#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spinsde/oracles.hpp"
#include "spinsde/spin_algebra.hpp"

using namespace spinsde;

namespace {

Vec3 random_vec(std::mt19937_64& rng, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

// exp(M) by truncated power series; independent of the Rodrigues form.
// Scaling and squaring keeps the series well conditioned for large angles.
Mat3 series_exp(const Mat3& m, int terms = 30) {
  int squarings = 0;
  Mat3 scaled = m;
  while (scaled.cwiseAbs().maxCoeff() > 0.125) {
    scaled /= 2.0;
    ++squarings;
  }
  Mat3 sum = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace

TEST_CASE("cross_matrix reproduces the cross product") {
  const Vec3 e1 = Vec3::UnitX(), e2 = Vec3::UnitY(), e3 = Vec3::UnitZ();
  CHECK((cross_matrix(e1) * e2 - e3).norm() == 0.0);
  CHECK(cross_matrix(Vec3::Zero()).isZero(0.0));
  const Vec3 x(1, 2, 3);
  CHECK((cross_matrix(x) * x).isZero(0.0));

  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a = random_vec(rng), c = random_vec(rng);
    const Mat3 m = cross_matrix(a);
    CHECK((m + m.transpose()).isZero(0.0));
    CHECK((m * c - a.cross(c)).norm() <= 1e-15);
    CHECK((cross_matrix(a) * c + cross_matrix(c) * a).norm() <= 1e-15);
  }
}

TEST_CASE("effective_operator annihilates its argument on both sides") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ua(0.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x = random_vec(rng);
    const double alpha = ua(rng);
    const Mat3 a = effective_operator(x, alpha);
    const double scale = (1.0 + alpha) * std::pow(x.norm(), 3);
    CHECK((a * x).norm() <= 1e-14 * scale);
    CHECK(std::abs(x.dot(a.transpose() * x)) <= 1e-14 * scale);

    const Vec3 u = x.normalized();
    const Mat3 au = effective_operator(u, alpha);
    CHECK((au * u).norm() <= 1e-14);
    CHECK(std::abs(u.dot(au.transpose() * u)) <= 1e-14);
  }
}

TEST_CASE("effective_operator examples") {
  const Vec3 x(0, 0, 1), b(1, 0, 0);
  CHECK((effective_operator(x, 2.0) * b - Vec3(2, -1, 0)).norm() <= 1e-15);

  const Vec3 y(0.3, -1.2, 0.7);
  CHECK((effective_operator(y, 0.0) + cross_matrix(y)).isZero(0.0));

  // Unit-sphere form alpha (I - x x^T) - L(x).
  const Vec3 u = y.normalized();
  const Mat3 sphere = 1.5 * (Mat3::Identity() - u * u.transpose()) - cross_matrix(u);
  CHECK((effective_operator(u, 1.5) - sphere).norm() <= 1e-15);
}

TEST_CASE("rotation_exp is the Rodrigues rotation") {
  CHECK(rotation_exp(Vec3(0.3, 0.1, -2.0), 0.0).isIdentity(0.0));

  const Mat3 quarter = rotation_exp(Vec3(0, 0, 1), std::numbers::pi / 2);
  CHECK((quarter * Vec3::UnitX() - Vec3::UnitY()).norm() <= 1e-15);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const Vec3 b = random_vec(rng);
    const double t = ut(rng);
    const Mat3 r = rotation_exp(b, t);
    CHECK((r * r.transpose() - Mat3::Identity()).norm() <= 1e-13);
    CHECK(std::abs(r.determinant() - 1.0) <= 1e-13);
    CHECK((r * b - b).norm() <= 1e-14 * (1.0 + b.norm()));
    CHECK((r - series_exp(cross_matrix(b) * t)).cwiseAbs().maxCoeff() <= 1e-12);

    const double s = ut(rng);
    CHECK((rotation_exp(b, t) * rotation_exp(b, s) - rotation_exp(b, t + s)).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("rotation_exp small-angle branch agrees with the series") {
  const Vec3 b(1e-5, -2e-5, 3e-6);
  for (double t : {1e-6, 1e-4, 2e-4}) {
    const Mat3 r = rotation_exp(b, t);
    CHECK((r - series_exp(cross_matrix(b) * t)).cwiseAbs().maxCoeff() <= 1e-16);
  }
}

TEST_CASE("strato_drift_correction examples") {
  CHECK((strato_drift_correction(Vec3(1, 0, 0), 1.0) - Vec3(-4, 0, 0)).norm() == 0.0);
  CHECK(strato_drift_correction(Vec3::Zero(), 3.0).isZero(0.0));
  const Vec3 u = Vec3(0.2, -0.4, 0.9).normalized();
  CHECK((strato_drift_correction(u, 0.0) + 2.0 * u).norm() <= 1e-15);
}

TEST_CASE("strato_drift_correction matches the finite-difference oracle") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ua(0.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = random_vec(rng);
    const double alpha = ua(rng);
    const Vec3 closed = strato_drift_correction(x, alpha);
    const Vec3 fd = fd_drift_correction(x, alpha);
    CHECK((fd - closed).norm() <= 1e-6 * closed.norm());
  }
}

TEST_CASE("kernels are generic in the scalar type") {
  const Eigen::Vector3f xf(0.f, 0.f, 1.f);
  const Eigen::Vector3f bf(1.f, 0.f, 0.f);
  CHECK((effective_operator(xf, 2.f) * bf - Eigen::Vector3f(2.f, -1.f, 0.f)).norm() <= 1e-6f);

  using Vec3l = Eigen::Matrix<long double, 3, 1>;
  const Vec3l b(0, 0, 1);
  const auto r = rotation_exp(b, std::numbers::pi_v<long double> / 2);
  CHECK(std::abs(static_cast<double>((r * Vec3l(1, 0, 0))(1)) - 1.0) <= 1e-15);
}

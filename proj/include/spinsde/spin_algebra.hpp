#pragma once

// Linear-algebra kernels for a single spin: the cross-product operator,
// the effective-field operator, the precession exponential and the
// Stratonovich-to-Ito drift correction. All functions are templated on the
// scalar type and are pure.

#include <cmath>

#include <Eigen/Dense>

namespace spinsde {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3T = Eigen::Matrix<Scalar, 3, 3>;

using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;

/// Antisymmetric matrix L(x) with L(x) * y == x.cross(y).
template <typename Derived>
Mat3T<typename Derived::Scalar> cross_matrix(const Eigen::MatrixBase<Derived>& x) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  Mat3T<Scalar> m;
  m << Scalar(0), -x(2), x(1),
       x(2), Scalar(0), -x(0),
       -x(1), x(0), Scalar(0);
  return m;
}

/// Effective operator A(x) = alpha |x|^2 I - alpha x x^T - L(x).
///
/// The general form is kept (no |x| = 1 shortcut) so identities derived off
/// the sphere can be checked. On the sphere it reduces to
/// alpha (I - x x^T) - L(x), and A(x) x = A(x)^T x = 0 for every x.
template <typename Derived>
Mat3T<typename Derived::Scalar> effective_operator(const Eigen::MatrixBase<Derived>& x,
                                                   typename Derived::Scalar alpha) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  const Vec3T<Scalar> v = x;
  return alpha * v.squaredNorm() * Mat3T<Scalar>::Identity() - alpha * v * v.transpose() -
         cross_matrix(v);
}

/// exp(L(b) t): rotation by angle |b| t about b / |b| (Rodrigues).
///
/// Below |b| t < 1e-8 the second-order Taylor form I + t L + t^2/2 L^2 is
/// used in place of the sin/|b| and (1 - cos)/|b|^2 quotients.
template <typename Derived>
Mat3T<typename Derived::Scalar> rotation_exp(const Eigen::MatrixBase<Derived>& b,
                                             typename Derived::Scalar t) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::cos;
  using std::sin;
  const Mat3T<Scalar> k = cross_matrix(b);
  const Mat3T<Scalar> k2 = k * k;
  const Scalar norm_b = b.norm();
  const Scalar theta = norm_b * t;
  if (abs(theta) < Scalar(1e-8)) {
    return Mat3T<Scalar>::Identity() + t * k + (t * t / Scalar(2)) * k2;
  }
  return Mat3T<Scalar>::Identity() + (sin(theta) / norm_b) * k +
         ((Scalar(1) - cos(theta)) / (norm_b * norm_b)) * k2;
}

/// Closed form of sum_j (D_j A)(x) A(x)^T e_j = -2 (alpha^2 |x|^2 + 1) x.
///
/// Half of this, scaled by eps_t^2, is the extra Ito drift of the
/// Stratonovich model.
template <typename Derived>
Vec3T<typename Derived::Scalar> strato_drift_correction(const Eigen::MatrixBase<Derived>& x,
                                                       typename Derived::Scalar alpha) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  const Vec3T<Scalar> v = x;
  return Scalar(-2) * (alpha * alpha * v.squaredNorm() + Scalar(1)) * v;
}

}  // namespace spinsde

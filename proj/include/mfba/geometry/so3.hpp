/**************************************************************************
 * Copyright (c) 2026 The mfba authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 **************************************************************************/

#pragma once

#include <cmath>

#include <Eigen/Geometry>

#include "mfba/core/types.hpp"

namespace mfba {

// Angle below which closed-form SO(3) expressions switch to their
// second-order Taylor expansions.
inline constexpr double kSmallAngle = 1e-8;

inline Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

inline Vec3 vee(const Mat3& m) {
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

/// Rodrigues formula with a Taylor branch for small angles.
inline Mat3 so3_exp(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  const Mat3 w = hat(omega);
  double a, b;  // R = I + a*[w]x + b*[w]x^2
  if (theta2 < kSmallAngle * kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + a * w + b * w * w;
}

/// Inverse of so3_exp on the closed ball of radius pi. The theta = pi
/// boundary is resolved through the quaternion sign returned by Eigen's
/// matrix-to-quaternion conversion, so log(exp(pi*a)) may come back as
/// -pi*a; both map to the same rotation.
inline Vec3 so3_log(const Mat3& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double nv = q.vec().norm();
  if (nv < 1e-12) {
    // theta/sin(theta/2) -> 2 as theta -> 0
    return 2.0 * q.vec() / q.w();
  }
  const double theta = 2.0 * std::atan2(nv, q.w());
  return (theta / nv) * q.vec();
}

/// Right Jacobian of SO(3): d Log(Exp(w)^-1 Exp(w + dw)) / d dw at dw = 0.
inline Mat3 so3_right_jacobian(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  const Mat3 w = hat(omega);
  if (theta2 < kSmallAngle * kSmallAngle) {
    return Mat3::Identity() - 0.5 * w + (1.0 / 6.0) * w * w;
  }
  const double theta = std::sqrt(theta2);
  const double a = (1.0 - std::cos(theta)) / theta2;
  const double b = (theta - std::sin(theta)) / (theta2 * theta);
  return Mat3::Identity() - a * w + b * w * w;
}

inline Mat3 so3_right_jacobian_inverse(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  const Mat3 w = hat(omega);
  if (theta2 < kSmallAngle * kSmallAngle) {
    return Mat3::Identity() + 0.5 * w + (1.0 / 12.0) * w * w;
  }
  const double theta = std::sqrt(theta2);
  const double b =
      1.0 / theta2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * w + b * w * w;
}

/// Projects a near-orthonormal matrix back onto SO(3). Used as the
/// re-orthonormalization policy after long composition chains.
inline Mat3 normalize_rotation(const Mat3& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  return q.toRotationMatrix();
}

inline bool is_rotation(const Mat3& R, double tol = 1e-9) {
  return (R * R.transpose() - Mat3::Identity()).norm() <= tol &&
         std::abs(R.determinant() - 1.0) <= tol;
}

}  // namespace mfba

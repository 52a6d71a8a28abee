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

#include <Eigen/Geometry>

#include "mfba/core/types.hpp"
#include "mfba/geometry/so3.hpp"

namespace mfba {

/// Rigid transform. A pose T = (R, p) maps points from its local frame
/// into the parent frame: X_parent = R * X_local + p.
///
/// Engine-wide perturbation convention (used by every manifold Jacobian
/// and by retraction): local/right decoupled increments
///
///   T (+) delta = (R * Exp(delta_phi), p + R * delta_rho),
///
/// with delta = [delta_rho (3), delta_phi (3)]. Rotations are stored as
/// matrices; quaternions appear only at file-format boundaries.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();

  Pose() = default;
  Pose(const Mat3& R_, const Vec3& p_) : R(R_), p(p_) {}

  static Pose Identity() { return Pose(); }

  Pose operator*(const Pose& other) const {
    return Pose(R * other.R, R * other.p + p);
  }

  Pose inverse() const { return Pose(R.transpose(), -(R.transpose() * p)); }

  Vec3 act(const Vec3& x) const { return R * x + p; }

  /// Right-decoupled retraction; delta = [rho, phi].
  Pose retract(const Vec6& delta) const {
    return Pose(R * so3_exp(delta.tail<3>()), p + R * delta.head<3>());
  }

  Eigen::Quaterniond quat() const { return Eigen::Quaterniond(R); }

  static Pose FromQuat(const Eigen::Quaterniond& q, const Vec3& p) {
    return Pose(q.normalized().toRotationMatrix(), p);
  }
};

/// Translation plus weighted rotation-angle distance between two poses.
inline double pose_distance(const Pose& a, const Pose& b,
                            double rotation_weight = 0.5) {
  const double angle = so3_log(a.R.transpose() * b.R).norm();
  return (a.p - b.p).norm() + rotation_weight * angle;
}

}  // namespace mfba

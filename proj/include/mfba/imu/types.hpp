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

#include "mfba/core/types.hpp"
#include "mfba/geometry/pose.hpp"

namespace mfba {

struct ImuSample {
  double t = 0.0;             // seconds
  Vec3 gyro = Vec3::Zero();   // rad/s
  Vec3 accel = Vec3::Zero();  // specific force, m/s^2
};

struct BiasPair {
  Vec3 ba = Vec3::Zero();  // m/s^2
  Vec3 bg = Vec3::Zero();  // rad/s
};

/// Velocity and biases of one keyframe. Velocity is the body velocity
/// expressed in the world frame; perturbations are plain additive.
struct MotionState {
  Vec3 v = Vec3::Zero();
  Vec3 ba = Vec3::Zero();
  Vec3 bg = Vec3::Zero();

  BiasPair bias() const { return {ba, bg}; }

  bool sane(double bias_bound = 1.0) const {
    return v.allFinite() && ba.allFinite() && bg.allFinite() &&
           ba.norm() < bias_bound && bg.norm() < bias_bound;
  }
};

/// Noise model, gravity, and the body-to-camera extrinsic.
///
/// T_cam_body maps body-frame coordinates into the camera frame, so the
/// body pose of a keyframe with camera pose T_wc is T_wc * T_cam_body.
struct ImuCalib {
  double sigma_g = 1.7e-4;        // gyro white noise density, rad/s/sqrt(Hz)
  double sigma_a = 2.0e-3;        // accel white noise density, m/s^2/sqrt(Hz)
  double sigma_bg_walk = 2.0e-5;  // gyro bias random walk, rad/s^2/sqrt(Hz)
  double sigma_ba_walk = 3.0e-3;  // accel bias random walk, m/s^3/sqrt(Hz)
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  Pose T_cam_body = Pose::Identity();

  void validate(bool allow_any_gravity = false) const {
    require(sigma_g > 0.0 && sigma_a > 0.0 && sigma_bg_walk > 0.0 &&
                sigma_ba_walk > 0.0,
            "ImuCalib: noise densities must be > 0");
    if (!allow_any_gravity) {
      const double g = gravity.norm();
      require(g >= 9.0 && g <= 10.5,
              "ImuCalib: |gravity| outside [9.0, 10.5]; pass "
              "allow_any_gravity to override");
    }
  }

  Pose body_pose(const Pose& T_wc) const { return T_wc * T_cam_body; }
  Pose camera_pose(const Pose& T_wb) const {
    return T_wb * T_cam_body.inverse();
  }
};

}  // namespace mfba

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

#include <vector>

#include "mfba/geometry/camera.hpp"
#include "mfba/geometry/pose.hpp"
#include "mfba/imu/types.hpp"

namespace mfba {

// Inverse depth is clamped here after every retraction.
inline constexpr double kMinInverseDepth = 1e-6;

/// Optimization state over one window: camera poses, motion states (only
/// when inertial factors are active), and one dense inverse-depth grid per
/// keyframe.
struct StateVector {
  std::vector<Pose> poses;
  std::vector<MotionState> motions;  // empty without inertial factors
  std::vector<DepthGrid> depths;

  int size() const { return static_cast<int>(poses.size()); }
  bool has_motion() const { return !motions.empty(); }

  void check() const {
    require(depths.size() == poses.size(),
            "StateVector: one depth grid per keyframe required");
    require(motions.empty() || motions.size() == poses.size(),
            "StateVector: motions must be absent or match keyframes");
  }
};

/// Gauge handling. Frozen poses keep their value exactly. freeze_scale adds
/// a soft per-pixel prior d ~ d_init on the anchor frame's grid, which pins
/// the monocular scale to the initial guess without coupling depth pixels
/// (the depth block must stay diagonal for the Schur elimination).
struct GaugeSpec {
  std::vector<int> frozen_poses;
  bool freeze_scale = false;
  int anchor_depth_frame = 0;
  double scale_prior_weight = 1.0;
  bool freeze_all_depths = false;  // known-depth modes

  bool pose_frozen(int k) const {
    return std::find(frozen_poses.begin(), frozen_poses.end(), k) !=
           frozen_poses.end();
  }
};

struct LmConfig {
  double lambda0 = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 0.5;
  double lambda_max = 1e8;
  int max_iterations = 15;
  double cost_tolerance = 1e-8;  // relative decrease
  double step_tolerance = 1e-10;

  void validate() const {
    require(lambda0 > 0.0, "LmConfig: lambda0 must be > 0");
    require(lambda_up > 1.0 && lambda_down < 1.0 && lambda_down > 0.0,
            "LmConfig: damping factors out of range");
    require(max_iterations >= 1, "LmConfig: max_iterations >= 1");
  }
};

}  // namespace mfba

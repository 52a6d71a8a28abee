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

#include "mfba/solver/lm.hpp"
#include "mfba/synth/imu_sim.hpp"
#include "mfba/synth/scene.hpp"

namespace mfba {

/// Synthetic multi-keyframe window with exact ground truth, used by the
/// numerical audits and the solver tests.
struct ScenarioSpec {
  int n_frames = 3;
  double keyframe_spacing = 0.3;  // s
  int edge_span = 2;              // connect |i-j| <= span, both directions
  bool use_imu = false;
  bool use_featmetric = false;
  bool use_reproj = true;
  SceneSpec scene;
  NoiseSpec imu_noise;
  ImuCalib calib;
  uint64_t seed = 1;
  double translation_scale = 1.0;  // shrink to keep all pixels co-visible
  double rotation_scale = 1.0;
  CameraIntrinsics K{40.0, 42.0, 31.5, 31.5, 64, 64};

  static TrajectorySpec default_motion(double duration, double tscale = 1.0,
                                       double rscale = 1.0) {
    TrajectorySpec t;
    t.kind = CurveKind::kLissajous;
    t.duration = duration;
    t.amplitude = tscale * Vec3(0.9, 0.7, 0.5);
    t.frequency = Vec3(1.1, 1.6, 2.1);
    t.phase = Vec3(0.2, 1.3, 2.6);
    t.orientation.rate = rscale * Vec3(0, 0, 0.4);
    t.orientation.amp = {rscale * Vec3(0.25, 0.3, 0.2)};
    t.orientation.freq = {Vec3(1.4, 1.0, 1.8)};
    t.orientation.phase = {Vec3(0.5, 1.6, 0.1)};
    return t;
  }
};

struct WindowScenario {
  Problem problem;
  StateVector gt;
  std::shared_ptr<SphereScene> scene;
  std::vector<double> kf_times;
  std::vector<Pose> gt_body;  // body poses at keyframes
  ImuStream imu;
};

inline WindowScenario make_window_scenario(const ScenarioSpec& spec) {
  WindowScenario w;
  const double duration =
      spec.keyframe_spacing * (spec.n_frames - 1) + 0.5;
  TrajectorySpec tspec = ScenarioSpec::default_motion(
      duration, spec.translation_scale, spec.rotation_scale);
  tspec.frame_rate = 20.0;
  tspec.imu_rate = 200.0;
  const SyntheticTrajectory traj = gen_trajectory(tspec);

  SceneSpec scene_spec = spec.scene;
  scene_spec.seed = scene_spec.seed ? scene_spec.seed : spec.seed;
  w.scene = std::make_shared<SphereScene>(scene_spec, spec.K);

  w.problem.K = spec.K;
  w.problem.grid = PixelGrid(spec.K, 8);
  w.problem.calib = spec.calib;

  if (spec.use_imu) {
    w.imu = gen_imu(traj, spec.calib.gravity, spec.imu_noise);
  }

  std::vector<std::shared_ptr<const FeatureMap>> maps(spec.n_frames);
  for (int k = 0; k < spec.n_frames; ++k) {
    const double t = spec.keyframe_spacing * k;
    w.kf_times.push_back(t);
    const TrajectorySample s = traj.at(t);
    w.gt_body.push_back(s.T_wb);
    const Pose T_wc = spec.calib.camera_pose(s.T_wb);
    w.gt.poses.push_back(T_wc);
    w.gt.depths.push_back(w.scene->depth_grid(T_wc));
    if (spec.use_imu) {
      MotionState m;
      m.v = s.v_w;
      m.ba = spec.imu_noise.ba0;
      m.bg = spec.imu_noise.bg0;
      w.gt.motions.push_back(m);
    }
    if (spec.use_featmetric)
      maps[k] = std::make_shared<FeatureMap>(
          w.scene->feature_map_noisy(T_wc, k));
  }

  for (int i = 0; i < spec.n_frames; ++i) {
    for (int j = 0; j < spec.n_frames; ++j) {
      if (i == j || std::abs(i - j) > spec.edge_span) continue;
      VisualEdge e;
      e.i = i;
      e.j = j;
      e.corr = w.scene->correspondences(w.gt.poses[i], w.gt.poses[j], i, j)
                   .field;
      e.use_reproj = spec.use_reproj;
      e.use_featmetric = spec.use_featmetric;
      if (spec.use_featmetric) {
        e.F_i = maps[i];
        e.F_j = maps[j];
      }
      w.problem.visual.push_back(std::move(e));
    }
  }

  if (spec.use_imu) {
    const double rate = tspec.imu_rate;
    for (int k = 0; k + 1 < spec.n_frames; ++k) {
      const int a = static_cast<int>(std::round(w.kf_times[k] * rate));
      const int b = static_cast<int>(std::round(w.kf_times[k + 1] * rate));
      std::span<const ImuSample> seg(w.imu.samples.data() + a, b - a + 1);
      InertialEdge e;
      e.i = k;
      e.j = k + 1;
      e.pre = preintegrate(seg, {spec.imu_noise.ba0, spec.imu_noise.bg0},
                           spec.calib, std::to_string(k));
      w.problem.inertial.push_back(std::move(e));
    }
  }
  return w;
}

}  // namespace mfba

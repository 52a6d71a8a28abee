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

#include <random>

#include "mfba/imu/types.hpp"
#include "mfba/synth/trajectory.hpp"

namespace mfba {

struct NoiseSpec {
  double sigma_g = 0.0;        // rad/s/sqrt(Hz)
  double sigma_a = 0.0;        // m/s^2/sqrt(Hz)
  double sigma_bg_walk = 0.0;  // rad/s^2/sqrt(Hz)
  double sigma_ba_walk = 0.0;  // m/s^3/sqrt(Hz)
  Vec3 bg0 = Vec3::Zero();     // constant initial biases
  Vec3 ba0 = Vec3::Zero();
  uint64_t seed = 0;

  void validate() const {
    require(sigma_g >= 0.0 && sigma_a >= 0.0 && sigma_bg_walk >= 0.0 &&
                sigma_ba_walk >= 0.0,
            "NoiseSpec: negative sigma");
  }
};

struct BiasTracePoint {
  double t;
  Vec3 ba, bg;
};

struct ImuStream {
  std::vector<ImuSample> samples;
  std::vector<BiasTracePoint> bias_trace;  // ground truth
};

/// Measurement model: accel = R^T (a_w - g) + ba + noise,
/// gyro = omega_body + bg + noise, biases follow a random walk.
/// Deterministic for a fixed (spec, seed).
inline ImuStream gen_imu(const SyntheticTrajectory& traj, const Vec3& gravity,
                         const NoiseSpec& noise) {
  noise.validate();
  std::mt19937_64 rng(noise.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto nvec = [&]() { return Vec3(gauss(rng), gauss(rng), gauss(rng)); };

  const std::vector<double> times = traj.imu_times();
  const double dt = times.size() > 1 ? times[1] - times[0] : 1.0;
  const double sqrt_dt = std::sqrt(dt);

  ImuStream out;
  Vec3 bg = noise.bg0, ba = noise.ba0;
  for (double t : times) {
    const TrajectorySample s = traj.at(t);
    ImuSample m;
    m.t = t;
    m.gyro = s.omega_b + bg;
    m.accel = s.T_wb.R.transpose() * (s.a_w - gravity) + ba;
    if (noise.sigma_g > 0.0) m.gyro += (noise.sigma_g / sqrt_dt) * nvec();
    if (noise.sigma_a > 0.0) m.accel += (noise.sigma_a / sqrt_dt) * nvec();
    out.samples.push_back(m);
    out.bias_trace.push_back({t, ba, bg});
    if (noise.sigma_bg_walk > 0.0) bg += noise.sigma_bg_walk * sqrt_dt * nvec();
    if (noise.sigma_ba_walk > 0.0) ba += noise.sigma_ba_walk * sqrt_dt * nvec();
  }
  return out;
}

}  // namespace mfba

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

#include <span>
#include <string>
#include <vector>

#include "mfba/imu/types.hpp"

namespace mfba {

/// Relative rotation/velocity/position accumulated between two keyframes,
/// independent of the absolute states. Bias Jacobians are the exact first
/// derivatives of the discrete midpoint scheme, so the first-order bias
/// correction has a quadratic remainder. Covariance is 9x9 over the
/// [rotation, velocity, position] error in that order.
struct Preintegrated {
  Mat3 delta_R = Mat3::Identity();
  Vec3 delta_v = Vec3::Zero();
  Vec3 delta_p = Vec3::Zero();

  BiasPair bias_lin;  // linearization point

  Mat3 J_R_bg = Mat3::Zero();
  Mat3 J_v_ba = Mat3::Zero();
  Mat3 J_v_bg = Mat3::Zero();
  Mat3 J_p_ba = Mat3::Zero();
  Mat3 J_p_bg = Mat3::Zero();

  Mat9 cov = Mat9::Zero();
  double dt = 0.0;
};

struct CorrectedDeltas {
  Mat3 delta_R;
  Vec3 delta_v;
  Vec3 delta_p;
};

/// First-order bias update of the stored deltas.
inline CorrectedDeltas corrected_deltas(const Preintegrated& pre,
                                        const BiasPair& bias) {
  const Vec3 dbg = bias.bg - pre.bias_lin.bg;
  const Vec3 dba = bias.ba - pre.bias_lin.ba;
  CorrectedDeltas out;
  out.delta_R = pre.delta_R * so3_exp(pre.J_R_bg * dbg);
  out.delta_v = pre.delta_v + pre.J_v_bg * dbg + pre.J_v_ba * dba;
  out.delta_p = pre.delta_p + pre.J_p_bg * dbg + pre.J_p_ba * dba;
  return out;
}

/// Midpoint integration of bias-corrected measurements over one segment.
/// Samples must span the inter-keyframe interval with strictly increasing
/// timestamps. Deterministic for fixed input.
inline Preintegrated preintegrate(std::span<const ImuSample> samples,
                                  const BiasPair& bias_lin,
                                  const ImuCalib& calib,
                                  const std::string& segment = "") {
  const std::string tag = segment.empty() ? "" : " [segment " + segment + "]";
  require(samples.size() >= 2,
          "preintegrate: need at least one sample interval" + tag);
  for (size_t k = 0; k + 1 < samples.size(); ++k) {
    require(samples[k + 1].t > samples[k].t,
            "preintegrate: non-monotonic timestamps at index " +
                std::to_string(k) + tag);
  }

  Preintegrated pre;
  pre.bias_lin = bias_lin;

  const double var_g = calib.sigma_g * calib.sigma_g;
  const double var_a = calib.sigma_a * calib.sigma_a;

  for (size_t k = 0; k + 1 < samples.size(); ++k) {
    const double dt = samples[k + 1].t - samples[k].t;
    const Vec3 u =
        0.5 * (samples[k].gyro + samples[k + 1].gyro) - bias_lin.bg;
    const Vec3 a =
        0.5 * (samples[k].accel + samples[k + 1].accel) - bias_lin.ba;

    const Mat3 E_full = so3_exp(u * dt);
    const Mat3 E_half = so3_exp(u * (0.5 * dt));
    const Mat3 Jr_full = so3_right_jacobian(u * dt);
    const Mat3 Jr_half = so3_right_jacobian(u * (0.5 * dt));
    const Mat3 R_h = pre.delta_R * E_half;
    // d(rotation of R_h)/d bg, right convention
    const Mat3 J_h =
        E_half.transpose() * pre.J_R_bg - Jr_half * (0.5 * dt);

    // covariance first (uses pre-update state)
    Mat9 A = Mat9::Identity();
    A.block<3, 3>(0, 0) = E_full.transpose();
    A.block<3, 3>(3, 0) = -R_h * hat(a) * E_half.transpose() * dt;
    A.block<3, 3>(6, 0) = -0.5 * R_h * hat(a) * E_half.transpose() * dt * dt;
    A.block<3, 3>(6, 3) = Mat3::Identity() * dt;

    Eigen::Matrix<double, 9, 6> B = Eigen::Matrix<double, 9, 6>::Zero();
    B.block<3, 3>(0, 0) = Jr_full * dt;
    B.block<3, 3>(3, 3) = R_h * dt;
    B.block<3, 3>(6, 3) = 0.5 * R_h * dt * dt;

    Eigen::Matrix<double, 6, 6> Q = Eigen::Matrix<double, 6, 6>::Zero();
    Q.diagonal().head<3>().setConstant(var_g / dt);
    Q.diagonal().tail<3>().setConstant(var_a / dt);

    pre.cov = A * pre.cov * A.transpose() + B * Q * B.transpose();
    pre.cov = 0.5 * (pre.cov + pre.cov.transpose()).eval();

    // bias Jacobians (pre-update values on the right-hand side)
    pre.J_p_ba += pre.J_v_ba * dt - 0.5 * R_h * dt * dt;
    pre.J_p_bg += pre.J_v_bg * dt - 0.5 * R_h * hat(a) * J_h * dt * dt;
    pre.J_v_ba += -R_h * dt;
    pre.J_v_bg += -R_h * hat(a) * J_h * dt;
    pre.J_R_bg = E_full.transpose() * pre.J_R_bg - Jr_full * dt;

    // deltas
    pre.delta_p += pre.delta_v * dt + 0.5 * R_h * a * dt * dt;
    pre.delta_v += R_h * a * dt;
    pre.delta_R = pre.delta_R * E_full;
    pre.dt += dt;
  }
  return pre;
}

// Regularizer applied before inverting the pre-integration covariance.
inline constexpr double kWeightRegularizer = 1e-12;

/// Information matrix of the pre-integrated deltas,
/// w_pu = (cov + lambda*I)^-1 in [rotation, velocity, position] order.
inline Mat9 preintegration_weight(const Preintegrated& pre,
                                  const std::string& segment = "") {
  require(pre.cov.allFinite(),
          "preintegration_weight: non-finite covariance" +
              (segment.empty() ? "" : " [segment " + segment + "]"));
  const Mat9 reg = pre.cov + kWeightRegularizer * Mat9::Identity();
  Mat9 w = reg.ldlt().solve(Mat9::Identity());
  return 0.5 * (w + w.transpose()).eval();
}

/// Predict the pose and velocity at j from the state at i. Poses are
/// camera poses; the extrinsic is applied internally.
struct Propagated {
  Pose T_wc;
  Vec3 v;
};

inline Propagated propagate(const Pose& T_wc_i, const MotionState& M_i,
                            const Preintegrated& pre, const ImuCalib& calib) {
  require(pre.dt > 0.0, "propagate: non-positive integration interval");
  const Pose T_wb_i = calib.body_pose(T_wc_i);
  const CorrectedDeltas d = corrected_deltas(pre, M_i.bias());
  const Vec3 g = calib.gravity;
  const double dt = pre.dt;

  Pose T_wb_j;
  T_wb_j.R = T_wb_i.R * d.delta_R;
  T_wb_j.p = T_wb_i.p + M_i.v * dt + 0.5 * g * dt * dt + T_wb_i.R * d.delta_p;
  const Vec3 v_j = M_i.v + g * dt + T_wb_i.R * d.delta_v;
  return {calib.camera_pose(T_wb_j), v_j};
}

}  // namespace mfba

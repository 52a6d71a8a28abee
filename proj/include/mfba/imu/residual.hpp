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

#include "mfba/imu/preintegration.hpp"

namespace mfba {

/// Two-view inertial residual, stacked as
///   [e_R (3), e_p (3), e_v (3), e_ba (3), e_bg (3)].
/// Jacobian columns follow the engine conventions: camera poses perturbed
/// right-decoupled [rho, phi], motion states additive [v, ba, bg].
struct InertialEval {
  Vec15 r = Vec15::Zero();
  Eigen::Matrix<double, 15, 6> J_Ti = Eigen::Matrix<double, 15, 6>::Zero();
  Eigen::Matrix<double, 15, 6> J_Tj = Eigen::Matrix<double, 15, 6>::Zero();
  Eigen::Matrix<double, 15, 9> J_Mi = Eigen::Matrix<double, 15, 9>::Zero();
  Eigen::Matrix<double, 15, 9> J_Mj = Eigen::Matrix<double, 15, 9>::Zero();
  Mat15 info = Mat15::Zero();
  double cost = 0.0;
};

/// Information of the residual: pre-integration weight w_pu on the
/// rotation/position/velocity rows, bias random-walk information on the
/// bias-difference rows, all scaled uniformly by the edge confidence w_u.
inline Mat15 inertial_information(const Preintegrated& pre,
                                  const ImuCalib& calib, double w_u) {
  const Mat9 w_pu = preintegration_weight(pre);  // [phi, v, p] order
  Mat15 info = Mat15::Zero();
  // permute to residual order [phi, p, v]
  const int map[3] = {0, 6, 3};  // residual block -> w_pu block offset
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      info.block<3, 3>(3 * a, 3 * b) =
          w_pu.block<3, 3>(map[a], map[b]);
  const double ia =
      1.0 / (calib.sigma_ba_walk * calib.sigma_ba_walk * pre.dt +
             kWeightRegularizer);
  const double ig =
      1.0 / (calib.sigma_bg_walk * calib.sigma_bg_walk * pre.dt +
             kWeightRegularizer);
  info.block<3, 3>(9, 9) = ia * Mat3::Identity();
  info.block<3, 3>(12, 12) = ig * Mat3::Identity();
  return w_u * info;
}

inline InertialEval inertial_residual(const Pose& T_wc_i,
                                      const MotionState& M_i,
                                      const Pose& T_wc_j,
                                      const MotionState& M_j,
                                      const Preintegrated& pre,
                                      const ImuCalib& calib, double w_u) {
  require(pre.dt > 0.0, "inertial_residual: non-positive dt");
  require(T_wc_i.p.allFinite() && T_wc_j.p.allFinite() && M_i.v.allFinite() &&
              M_j.v.allFinite(),
          "inertial_residual: non-finite state");

  const Pose T_wb_i = calib.body_pose(T_wc_i);
  const Pose T_wb_j = calib.body_pose(T_wc_j);
  const Mat3& R_i = T_wb_i.R;
  const Mat3& R_j = T_wb_j.R;
  const Vec3& p_i = T_wb_i.p;
  const Vec3& p_j = T_wb_j.p;
  const double dt = pre.dt;
  const Vec3 g = calib.gravity;

  const Vec3 dbg = M_i.bg - pre.bias_lin.bg;
  const Vec3 dba = M_i.ba - pre.bias_lin.ba;
  const CorrectedDeltas d = corrected_deltas(pre, M_i.bias());

  InertialEval out;

  // residual
  const Mat3 R_err = d.delta_R.transpose() * R_i.transpose() * R_j;
  const Vec3 e_R = so3_log(R_err);
  const Vec3 s_p = p_j - p_i - M_i.v * dt - 0.5 * g * dt * dt;
  const Vec3 e_p = R_i.transpose() * s_p - d.delta_p;
  const Vec3 s_v = M_j.v - M_i.v - g * dt;
  const Vec3 e_v = R_i.transpose() * s_v - d.delta_v;
  out.r << e_R, e_p, e_v, M_j.ba - M_i.ba, M_j.bg - M_i.bg;

  // body-frame Jacobians: rotation rows w.r.t. right perturbation of the
  // body rotation, translation rows w.r.t. additive world-frame shifts
  const Mat3 JrInv = so3_right_jacobian_inverse(e_R);
  const Mat3 dR_phi_i = -JrInv * R_j.transpose() * R_i;
  const Mat3 dR_phi_j = JrInv;
  const Vec3 xi = pre.J_R_bg * dbg;
  const Mat3 dR_bg =
      -JrInv * so3_exp(e_R).transpose() * so3_right_jacobian(xi) * pre.J_R_bg;

  const Mat3 dp_phi_i = hat(R_i.transpose() * s_p);
  const Mat3 dv_phi_i = hat(R_i.transpose() * s_v);
  const Mat3 Rit = R_i.transpose();

  // chain from body perturbations to camera-pose perturbations
  const Mat3 R_a = calib.T_cam_body.R;
  const Vec3 p_a = calib.T_cam_body.p;
  const Mat3 R_wc_i = T_wc_i.R;
  const Mat3 R_wc_j = T_wc_j.R;

  auto chain = [&](const Mat3& J_phi_b, const Mat3& J_p_w,
                   const Mat3& R_wc) -> Mat36 {
    Mat36 J;
    J.leftCols<3>() = J_p_w * R_wc;
    J.rightCols<3>() = J_phi_b * R_a.transpose() - J_p_w * R_wc * hat(p_a);
    return J;
  };

  out.J_Ti.block<3, 6>(0, 0) = chain(dR_phi_i, Mat3::Zero(), R_wc_i);
  out.J_Ti.block<3, 6>(3, 0) = chain(dp_phi_i, -Rit, R_wc_i);
  out.J_Ti.block<3, 6>(6, 0) = chain(dv_phi_i, Mat3::Zero(), R_wc_i);

  out.J_Tj.block<3, 6>(0, 0) = chain(dR_phi_j, Mat3::Zero(), R_wc_j);
  out.J_Tj.block<3, 6>(3, 0) = chain(Mat3::Zero(), Rit, R_wc_j);

  // motion columns [v, ba, bg]
  out.J_Mi.block<3, 3>(0, 6) = dR_bg;
  out.J_Mi.block<3, 3>(3, 0) = -Rit * dt;
  out.J_Mi.block<3, 3>(3, 3) = -pre.J_p_ba;
  out.J_Mi.block<3, 3>(3, 6) = -pre.J_p_bg;
  out.J_Mi.block<3, 3>(6, 0) = -Rit;
  out.J_Mi.block<3, 3>(6, 3) = -pre.J_v_ba;
  out.J_Mi.block<3, 3>(6, 6) = -pre.J_v_bg;
  out.J_Mi.block<3, 3>(9, 3) = -Mat3::Identity();
  out.J_Mi.block<3, 3>(12, 6) = -Mat3::Identity();

  out.J_Mj.block<3, 3>(6, 0) = Rit;
  out.J_Mj.block<3, 3>(9, 3) = Mat3::Identity();
  out.J_Mj.block<3, 3>(12, 6) = Mat3::Identity();

  out.info = inertial_information(pre, calib, w_u);
  out.cost = out.r.dot(out.info * out.r);
  return out;
}

}  // namespace mfba

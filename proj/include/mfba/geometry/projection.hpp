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

namespace mfba {

// Minimum depth in the target camera; anything closer or behind is invalid.
inline constexpr double kMinTargetDepth = 1e-6;

/// Dense projection of frame i's lattice into frame j. Out-of-image and
/// non-positive-depth pixels are flagged, never clamped.
struct ProjectionField {
  std::vector<Vec2> pixel;      // projected full-res coordinates in j
  std::vector<uint8_t> valid;   // 1 iff in front of j and inside the image
  std::vector<double> depth_j;  // z in camera j (only meaningful if valid)

  int size() const { return static_cast<int>(pixel.size()); }
};

/// Per-pixel Jacobians of the projected coordinate. Columns follow the
/// engine convention: [rho (3), phi (3)] right-decoupled perturbations of
/// T_i and T_j, plus the scalar inverse depth of the pixel.
struct ProjectionJacobians {
  std::vector<Mat26> J_Ti;
  std::vector<Mat26> J_Tj;
  std::vector<Vec2> J_d;
};

/// Back-project frame i's lattice with its inverse depth, transform by the
/// relative pose, and project into frame j.
inline ProjectionField project(const Pose& T_i, const Pose& T_j,
                               const DepthGrid& d, const PixelGrid& grid,
                               const CameraIntrinsics& K) {
  require(d.matches(grid), "project: depth grid does not match pixel grid");
  const int n = grid.size();
  ProjectionField out;
  out.pixel.assign(n, Vec2::Zero());
  out.valid.assign(n, 0);
  out.depth_j.assign(n, 0.0);

  const Mat3 R_ji = T_j.R.transpose() * T_i.R;
  const Vec3 t_ji = T_j.R.transpose() * (T_i.p - T_j.p);

  for (int q = 0; q < n; ++q) {
    const double dq = d.at(q);
    if (!(dq > 0.0) || !std::isfinite(dq)) continue;
    const Vec3 xi = K.unproject(grid.at(q)) / dq;
    const Vec3 xj = R_ji * xi + t_ji;
    if (xj.z() <= kMinTargetDepth) continue;
    const Vec2 u = K.project(xj);
    out.pixel[q] = u;
    out.depth_j[q] = xj.z();
    out.valid[q] = K.in_image(u) ? 1 : 0;
  }
  return out;
}

/// Analytic Jacobians of project(). Invalid pixels get zero blocks.
inline ProjectionField project_with_jacobians(const Pose& T_i, const Pose& T_j,
                                              const DepthGrid& d,
                                              const PixelGrid& grid,
                                              const CameraIntrinsics& K,
                                              ProjectionJacobians* jac) {
  require(d.matches(grid), "project: depth grid does not match pixel grid");
  const int n = grid.size();
  ProjectionField out;
  out.pixel.assign(n, Vec2::Zero());
  out.valid.assign(n, 0);
  out.depth_j.assign(n, 0.0);
  jac->J_Ti.assign(n, Mat26::Zero());
  jac->J_Tj.assign(n, Mat26::Zero());
  jac->J_d.assign(n, Vec2::Zero());

  const Mat3 R_ji = T_j.R.transpose() * T_i.R;
  const Vec3 t_ji = T_j.R.transpose() * (T_i.p - T_j.p);

  for (int q = 0; q < n; ++q) {
    const double dq = d.at(q);
    if (!(dq > 0.0) || !std::isfinite(dq)) continue;
    const Vec3 xi = K.unproject(grid.at(q)) / dq;
    const Vec3 xj = R_ji * xi + t_ji;
    if (xj.z() <= kMinTargetDepth) continue;
    const Vec2 u = K.project(xj);
    out.pixel[q] = u;
    out.depth_j[q] = xj.z();
    out.valid[q] = K.in_image(u) ? 1 : 0;
    if (!out.valid[q]) continue;

    const double iz = 1.0 / xj.z();
    Mat23 P;
    P << K.fx * iz, 0.0, -K.fx * xj.x() * iz * iz,  //
        0.0, K.fy * iz, -K.fy * xj.y() * iz * iz;

    Eigen::Matrix<double, 3, 6> dxj_di;
    dxj_di.leftCols<3>() = R_ji;
    dxj_di.rightCols<3>() = -R_ji * hat(xi);
    jac->J_Ti[q] = P * dxj_di;

    Eigen::Matrix<double, 3, 6> dxj_dj;
    dxj_dj.leftCols<3>() = -Mat3::Identity();
    dxj_dj.rightCols<3>() = hat(xj);
    jac->J_Tj[q] = P * dxj_dj;

    jac->J_d[q] = P * (-(R_ji * xi) / dq);
  }
  return out;
}

}  // namespace mfba

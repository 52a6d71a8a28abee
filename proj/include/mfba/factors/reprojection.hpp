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

#include "mfba/factors/data.hpp"
#include "mfba/geometry/projection.hpp"

namespace mfba {

/// Per-pixel linearization of one weighted visual term on an edge (i, j).
/// Rows are the residual components of one pixel (2 for re-projection,
/// C for feature-metric); inactive pixels contribute zero residual and
/// zero Jacobian. Cost is the diagonal Mahalanobis total
///   sum_q r_q^T diag(w_q) r_q.
struct VisualTermEval {
  double cost = 0.0;
  int valid_count = 0;
  std::vector<uint8_t> active;
  std::vector<VecX> residual;  // k
  std::vector<VecX> weight;    // k, non-negative
  std::vector<MatX> J_Ti;      // k x 6
  std::vector<MatX> J_Tj;      // k x 6
  std::vector<VecX> J_d;       // k

  void resize(int n, int k) {
    active.assign(n, 0);
    residual.assign(n, VecX::Zero(k));
    weight.assign(n, VecX::Zero(k));
    J_Ti.assign(n, MatX::Zero(k, 6));
    J_Tj.assign(n, MatX::Zero(k, 6));
    J_d.assign(n, VecX::Zero(k));
  }
};

/// Re-projection term: r = x* - proj(T_i, T_j, d_i, x_i), weighted by the
/// per-pixel 2-vector confidence.
inline VisualTermEval reprojection_term(const Pose& T_i, const Pose& T_j,
                                        const DepthGrid& d,
                                        const PixelGrid& grid,
                                        const CameraIntrinsics& K,
                                        const CorrespondenceField& corr,
                                        const std::vector<Vec2>& w_r) {
  require(corr.matches(grid),
          "reprojection_term: correspondence field does not match the grid");
  require(static_cast<int>(w_r.size()) == grid.size(),
          "reprojection_term: confidence map does not match the grid");

  ProjectionJacobians jac;
  const ProjectionField f = project_with_jacobians(T_i, T_j, d, grid, K, &jac);

  VisualTermEval out;
  out.resize(grid.size(), 2);
  for (int q = 0; q < grid.size(); ++q) {
    if (!f.valid[q] || !corr.valid[q]) continue;
    out.active[q] = 1;
    ++out.valid_count;
    const Vec2 r = corr.target[q] - f.pixel[q];
    out.residual[q] = r;
    out.weight[q] = w_r[q].cwiseMax(0.0);
    out.J_Ti[q] = -jac.J_Ti[q];
    out.J_Tj[q] = -jac.J_Tj[q];
    out.J_d[q] = -jac.J_d[q];
    out.cost += r.x() * r.x() * out.weight[q][0] +
                r.y() * r.y() * out.weight[q][1];
  }
  return out;
}

}  // namespace mfba

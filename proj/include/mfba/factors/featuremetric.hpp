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

#include "mfba/factors/reprojection.hpp"

namespace mfba {

/// Feature-metric term: r = F_i(x_i) - F_j(proj(T_i, T_j, d_i, x_i)) with
/// bilinear sampling in F_j. One scalar confidence per pixel weights all C
/// channels. Pixels whose projection leaves the gradient-safe interior are
/// masked, so boundary-grazing poses cannot leak NaNs.
inline VisualTermEval featuremetric_term(const Pose& T_i, const Pose& T_j,
                                         const DepthGrid& d,
                                         const PixelGrid& grid,
                                         const CameraIntrinsics& K,
                                         const FeatureMap& F_i,
                                         const FeatureMap& F_j,
                                         const VecX& w_f) {
  require(F_i.channels == F_j.channels && F_i.width == F_j.width &&
              F_i.height == F_j.height,
          "featuremetric_term: feature map dimensions disagree");
  require(w_f.size() == grid.size(),
          "featuremetric_term: confidence map does not match the grid");
  require(d.matches(grid),
          "featuremetric_term: depth grid does not match the pixel grid");

  const int C = F_i.channels;
  ProjectionJacobians jac;
  const ProjectionField f = project_with_jacobians(T_i, T_j, d, grid, K, &jac);

  VisualTermEval out;
  out.resize(grid.size(), C);
  for (int q = 0; q < grid.size(); ++q) {
    if (!f.valid[q]) continue;
    const Vec2& u = f.pixel[q];
    if (!F_j.in_bounds(u, 1.0) || !F_i.in_bounds(grid.at(q), 1.0)) continue;
    out.active[q] = 1;
    ++out.valid_count;

    const VecX r = F_i.sample(grid.at(q)) - F_j.sample(u);
    const MatX grad = F_j.sample_gradient(u);  // C x 2
    const double w = std::max(w_f[q], 0.0);

    out.residual[q] = r;
    out.weight[q] = VecX::Constant(C, w);
    out.J_Ti[q] = -grad * jac.J_Ti[q];
    out.J_Tj[q] = -grad * jac.J_Tj[q];
    out.J_d[q] = -grad * jac.J_d[q];
    out.cost += w * r.squaredNorm();
  }
  return out;
}

}  // namespace mfba

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

#include "mfba/solver/system.hpp"

namespace mfba {

struct SchurResult {
  VecX dx_dense;               // pose/motion update, layout order
  std::vector<VecX> dx_depth;  // per frame (zero where depth frozen)
  bool ok = false;
  bool rank_deficient = false;
  bool bad_depth_entry = false;  // non-positive damped diagonal
};

/// Eliminate every inverse-depth scalar, solve the reduced pose/motion
/// system damped by lambda, and back-substitute the depth updates. Each
/// depth pixel couples only the poses of the edges observing it, so the
/// reduction is a sequence of rank-one updates.
inline SchurResult schur_solve(const LinearSystem& sys, double lambda) {
  SchurResult out;
  const int D = sys.layout.dense_dim();
  MatX Hr = sys.H + lambda * MatX::Identity(D, D);
  VecX gr = sys.g;

  for (size_t f = 0; f < sys.depth.size(); ++f) {
    if (!sys.depth_active[f]) continue;
    for (const DepthEntry& de : sys.depth[f]) {
      const double h = de.H + lambda;
      if (!(h > 0.0)) {
        out.bad_depth_entry = true;
        return out;
      }
      if (de.pose_cols.empty()) continue;
      for (const auto& [oa, ca] : de.pose_cols) {
        gr.segment<6>(oa) -= ca * (de.g / h);
        for (const auto& [ob, cb] : de.pose_cols)
          Hr.block<6, 6>(oa, ob) -= ca * cb.transpose() / h;
      }
    }
  }

  const Eigen::LDLT<MatX> ldlt(Hr);
  out.dx_dense = ldlt.solve(-gr);
  const double resid = (Hr * out.dx_dense + gr).norm();
  if (!out.dx_dense.allFinite() || resid > 1e-8 * (gr.norm() + 1.0)) {
    out.rank_deficient = true;
    return out;
  }

  out.dx_depth.resize(sys.depth.size());
  for (size_t f = 0; f < sys.depth.size(); ++f) {
    out.dx_depth[f] = VecX::Zero(sys.depth[f].size());
    if (!sys.depth_active[f]) continue;
    for (size_t q = 0; q < sys.depth[f].size(); ++q) {
      const DepthEntry& de = sys.depth[f][q];
      double num = -de.g;
      for (const auto& [off, c] : de.pose_cols)
        num -= c.dot(out.dx_dense.segment<6>(off));
      out.dx_depth[f][q] = num / (de.H + lambda);
    }
  }
  out.ok = true;
  return out;
}

}  // namespace mfba

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

#include "mfba/solver/problem.hpp"

namespace mfba {

/// Dense variable layout: pose blocks first, then motion blocks.
struct BlockLayout {
  int n_frames = 0;
  bool has_motion = false;

  int pose_offset(int k) const { return 6 * k; }
  int motion_offset(int k) const { return 6 * n_frames + 9 * k; }
  int dense_dim() const { return 6 * n_frames + (has_motion ? 9 * n_frames : 0); }
};

/// One eliminated inverse-depth scalar: diagonal entry, gradient, and its
/// sparse coupling row into the dense pose blocks.
struct DepthEntry {
  double H = 0.0;
  double g = 0.0;
  std::vector<std::pair<int, Vec6>> pose_cols;  // dense offset -> 6-vector

  void add_coupling(int offset, const Vec6& v) {
    for (auto& [o, col] : pose_cols) {
      if (o == offset) {
        col += v;
        return;
      }
    }
    pose_cols.emplace_back(offset, v);
  }
};

/// Gauss-Newton normal equations H dx = -g with the dense pose/motion part
/// materialized and the per-pixel depth block kept in eliminated form.
struct LinearSystem {
  BlockLayout layout;
  MatX H;
  VecX g;
  std::vector<std::vector<DepthEntry>> depth;  // [frame][pixel]
  std::vector<uint8_t> depth_active;           // depth optimized per frame
  double prior_cost = 0.0;                     // gauge prior contribution

  int depth_dim() const {
    int n = 0;
    for (size_t f = 0; f < depth.size(); ++f)
      if (depth_active[f]) n += static_cast<int>(depth[f].size());
    return n;
  }
};

/// Assemble H = sum J^T W J and g = sum J^T W r over all evaluated terms.
inline LinearSystem build_system(const Problem& problem,
                                 const StateVector& state,
                                 const EvaluatedTerms& terms) {
  LinearSystem sys;
  sys.layout.n_frames = state.size();
  sys.layout.has_motion = state.has_motion();
  const int D = sys.layout.dense_dim();
  sys.H = MatX::Zero(D, D);
  sys.g = VecX::Zero(D);
  sys.depth.resize(state.size());
  sys.depth_active.assign(state.size(), 1);
  for (int f = 0; f < state.size(); ++f)
    sys.depth[f].resize(state.depths[f].size());

  const int n = problem.grid.size();

  auto accumulate_visual = [&](const VisualEdge& edge,
                               const VisualTermEval& ev) {
    require(static_cast<int>(ev.active.size()) == n,
            "build_system: term dimensions inconsistent on edge " +
                std::to_string(edge.i) + "->" + std::to_string(edge.j));
    const int oi = sys.layout.pose_offset(edge.i);
    const int oj = sys.layout.pose_offset(edge.j);
    for (int q = 0; q < n; ++q) {
      if (!ev.active[q]) continue;
      const VecX& w = ev.weight[q];
      const MatX Ji_w = ev.J_Ti[q].transpose() * w.asDiagonal();  // 6 x k
      const MatX Jj_w = ev.J_Tj[q].transpose() * w.asDiagonal();
      sys.H.block<6, 6>(oi, oi) += Ji_w * ev.J_Ti[q];
      sys.H.block<6, 6>(oj, oj) += Jj_w * ev.J_Tj[q];
      const Mat6 Hij = Ji_w * ev.J_Tj[q];
      sys.H.block<6, 6>(oi, oj) += Hij;
      sys.H.block<6, 6>(oj, oi) += Hij.transpose();
      sys.g.segment<6>(oi) += Ji_w * ev.residual[q];
      sys.g.segment<6>(oj) += Jj_w * ev.residual[q];

      DepthEntry& de = sys.depth[edge.i][q];
      const VecX wJd = w.cwiseProduct(ev.J_d[q]);
      de.H += ev.J_d[q].dot(wJd);
      de.g += ev.residual[q].dot(wJd);
      de.add_coupling(oi, ev.J_Ti[q].transpose() * wJd);
      de.add_coupling(oj, ev.J_Tj[q].transpose() * wJd);
    }
  };

  for (const auto& ev : terms.visual) {
    const VisualEdge& edge = problem.visual[ev.edge_index];
    if (ev.has_reproj) accumulate_visual(edge, ev.reproj);
    if (ev.has_feat) accumulate_visual(edge, ev.feat);
  }

  for (size_t k = 0; k < terms.inertial.size(); ++k) {
    const InertialEdge& edge = problem.inertial[k];
    require(edge.j == edge.i + 1,
            "build_system: inertial edge must be consecutive: " +
                std::to_string(edge.i) + "->" + std::to_string(edge.j));
    const InertialEval& ev = terms.inertial[k];

    Eigen::Matrix<double, 15, 30> J;
    J << ev.J_Ti, ev.J_Mi, ev.J_Tj, ev.J_Mj;
    const Eigen::Matrix<double, 30, 30> Hb = J.transpose() * ev.info * J;
    const Eigen::Matrix<double, 30, 1> gb = J.transpose() * (ev.info * ev.r);

    const int off[4] = {sys.layout.pose_offset(edge.i),
                        sys.layout.motion_offset(edge.i),
                        sys.layout.pose_offset(edge.j),
                        sys.layout.motion_offset(edge.j)};
    const int sz[4] = {6, 9, 6, 9};
    const int loc[4] = {0, 6, 15, 21};
    for (int a = 0; a < 4; ++a) {
      sys.g.segment(off[a], sz[a]) += gb.segment(loc[a], sz[a]);
      for (int b = 0; b < 4; ++b)
        sys.H.block(off[a], off[b], sz[a], sz[b]) +=
            Hb.block(loc[a], loc[b], sz[a], sz[b]);
    }
  }
  return sys;
}

/// Freeze gauge directions: frozen pose blocks are zeroed with unit
/// diagonal (including their depth couplings), fixed-depth frames drop out
/// of the elimination, and the scale prior lands on the anchor grid.
inline void apply_gauge(LinearSystem& sys, const GaugeSpec& gauge,
                        const StateVector& state,
                        const StateVector& reference) {
  for (int k : gauge.frozen_poses) {
    require(k >= 0 && k < sys.layout.n_frames, "apply_gauge: bad pose index");
    const int o = sys.layout.pose_offset(k);
    sys.H.middleRows(o, 6).setZero();
    sys.H.middleCols(o, 6).setZero();
    sys.H.block<6, 6>(o, o) = Mat6::Identity();
    sys.g.segment<6>(o).setZero();
    for (auto& frame : sys.depth)
      for (DepthEntry& de : frame)
        for (auto& [off, col] : de.pose_cols)
          if (off == o) col.setZero();
  }

  if (gauge.freeze_all_depths)
    std::fill(sys.depth_active.begin(), sys.depth_active.end(), 0);

  if (gauge.freeze_scale && !gauge.freeze_all_depths) {
    const int f = gauge.anchor_depth_frame;
    require(f >= 0 && f < sys.layout.n_frames,
            "apply_gauge: bad anchor frame");
    const double w = gauge.scale_prior_weight;
    for (size_t q = 0; q < sys.depth[f].size(); ++q) {
      const double r =
          state.depths[f].inv_depth[q] - reference.depths[f].inv_depth[q];
      sys.depth[f][q].H += w;
      sys.depth[f][q].g += w * r;
      sys.prior_cost += w * r * r;
    }
  }
}

/// Materialize the full (dense + depth) Hessian; used by the gauge
/// eigenvalue audit and by the full-solve test oracle.
inline MatX dense_full_hessian(const LinearSystem& sys) {
  const int D = sys.layout.dense_dim();
  int P = sys.depth_dim();
  MatX H = MatX::Zero(D + P, D + P);
  H.topLeftCorner(D, D) = sys.H;
  int col = D;
  for (size_t f = 0; f < sys.depth.size(); ++f) {
    if (!sys.depth_active[f]) continue;
    for (const DepthEntry& de : sys.depth[f]) {
      H(col, col) = de.H;
      for (const auto& [off, c] : de.pose_cols) {
        H.block<6, 1>(off, col) += c;
        H.block<1, 6>(col, off) += c.transpose();
      }
      ++col;
    }
  }
  return H;
}

/// Gradient counterpart of dense_full_hessian.
inline VecX dense_full_gradient(const LinearSystem& sys) {
  const int D = sys.layout.dense_dim();
  VecX g(D + sys.depth_dim());
  g.head(D) = sys.g;
  int row = D;
  for (size_t f = 0; f < sys.depth.size(); ++f) {
    if (!sys.depth_active[f]) continue;
    for (const DepthEntry& de : sys.depth[f]) g[row++] = de.g;
  }
  return g;
}

}  // namespace mfba

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

#include <memory>

#include "mfba/factors/confidence.hpp"
#include "mfba/factors/featuremetric.hpp"
#include "mfba/imu/residual.hpp"
#include "mfba/solver/state.hpp"

namespace mfba {

/// Directed co-visibility edge (i, j): frame i's lattice and depth observed
/// in frame j. Carries its own data and confidence policy.
struct VisualEdge {
  int i = 0, j = 0;
  CorrespondenceField corr;
  std::shared_ptr<const FeatureMap> F_i, F_j;
  bool use_reproj = true;
  bool use_featmetric = false;
  ConfidenceProvider provider = UniformConfidence{};
};

/// Inertial edge between consecutive keyframes.
struct InertialEdge {
  int i = 0, j = 0;
  Preintegrated pre;
};

/// One bundle-adjustment problem over a window of keyframes.
struct Problem {
  CameraIntrinsics K;
  PixelGrid grid;
  ImuCalib calib;
  std::vector<VisualEdge> visual;
  std::vector<InertialEdge> inertial;
  ConfidenceProvider imu_provider = UniformConfidence{};

  void check(const StateVector& state) const {
    state.check();
    for (const VisualEdge& e : visual) {
      require(e.i >= 0 && e.i < state.size() && e.j >= 0 &&
                  e.j < state.size() && e.i != e.j,
              "Problem: visual edge indices out of range");
      require(e.corr.matches(grid) || !e.use_reproj,
              "Problem: correspondence field mismatch on edge " +
                  std::to_string(e.i) + "->" + std::to_string(e.j));
      require(!e.use_featmetric || (e.F_i && e.F_j),
              "Problem: feature-metric edge without feature maps");
    }
    for (const InertialEdge& e : inertial) {
      require(e.j == e.i + 1,
              "Problem: inertial edges must connect consecutive keyframes");
      require(e.j < state.size(), "Problem: inertial edge out of range");
      require(state.has_motion(),
              "Problem: inertial edges require motion states");
    }
  }
};

/// Confidence maps of one iteration, fixed while candidate steps are
/// evaluated against the current cost.
struct ConfidenceSet {
  std::vector<ConfidenceMaps> visual;  // parallel to Problem::visual
  double w_u = 1.0;

  double mean_w_r() const {
    double s = 0.0;
    for (const auto& m : visual) s += m.mean_w_r();
    return visual.empty() ? 0.0 : s / static_cast<double>(visual.size());
  }
  double mean_w_f() const {
    double s = 0.0;
    for (const auto& m : visual) s += m.mean_w_f();
    return visual.empty() ? 0.0 : s / static_cast<double>(visual.size());
  }
};

inline ConfidenceSet query_confidence(
    const Problem& problem, int iteration,
    const std::vector<ResidualSnapshot>& snapshots) {
  ConfidenceSet out;
  static const ResidualSnapshot empty;
  for (size_t e = 0; e < problem.visual.size(); ++e) {
    const ResidualSnapshot& snap =
        e < snapshots.size() ? snapshots[e] : empty;
    out.visual.push_back(provide_confidence(problem.visual[e].provider,
                                            iteration, snap,
                                            problem.grid.size()));
  }
  out.w_u = provide_confidence(problem.imu_provider, iteration, empty, 0).w_u;
  return out;
}

/// All factor terms linearized at one state under fixed confidence maps.
struct EvaluatedTerms {
  struct VisualEvals {
    int edge_index = 0;
    VisualTermEval reproj;
    VisualTermEval feat;
    bool has_reproj = false, has_feat = false;
  };
  std::vector<VisualEvals> visual;
  std::vector<InertialEval> inertial;  // parallel to Problem::inertial
  double cost_reproj = 0.0;
  double cost_feat = 0.0;
  double cost_inertial = 0.0;

  double factor_cost() const {
    return cost_reproj + cost_feat + cost_inertial;
  }
};

inline EvaluatedTerms evaluate_terms(const Problem& problem,
                                     const StateVector& state,
                                     const ConfidenceSet& conf) {
  problem.check(state);
  require(conf.visual.size() == problem.visual.size(),
          "evaluate_terms: confidence set does not match the edge set");

  EvaluatedTerms out;
  for (size_t e = 0; e < problem.visual.size(); ++e) {
    const VisualEdge& edge = problem.visual[e];
    EvaluatedTerms::VisualEvals ev;
    ev.edge_index = static_cast<int>(e);
    if (edge.use_reproj) {
      ev.reproj = reprojection_term(state.poses[edge.i], state.poses[edge.j],
                                    state.depths[edge.i], problem.grid,
                                    problem.K, edge.corr,
                                    conf.visual[e].w_r);
      ev.has_reproj = true;
      out.cost_reproj += ev.reproj.cost;
    }
    if (edge.use_featmetric) {
      ev.feat = featuremetric_term(state.poses[edge.i], state.poses[edge.j],
                                   state.depths[edge.i], problem.grid,
                                   problem.K, *edge.F_i, *edge.F_j,
                                   conf.visual[e].w_f);
      ev.has_feat = true;
      out.cost_feat += ev.feat.cost;
    }
    out.visual.push_back(std::move(ev));
  }

  for (const InertialEdge& e : problem.inertial) {
    out.inertial.push_back(inertial_residual(
        state.poses[e.i], state.motions[e.i], state.poses[e.j],
        state.motions[e.j], e.pre, problem.calib, conf.w_u));
    out.cost_inertial += out.inertial.back().cost;
  }
  return out;
}

/// Per-pixel residual magnitudes feeding the adaptive confidence policy.
inline std::vector<ResidualSnapshot> residual_snapshots(
    const Problem& problem, const EvaluatedTerms& terms) {
  const int n = problem.grid.size();
  std::vector<ResidualSnapshot> out(problem.visual.size());
  for (const auto& ev : terms.visual) {
    ResidualSnapshot& snap = out[ev.edge_index];
    if (ev.has_reproj) {
      snap.reproj_norm = VecX::Zero(n);
      for (int q = 0; q < n; ++q)
        if (ev.reproj.active[q])
          snap.reproj_norm[q] = ev.reproj.residual[q].norm();
    }
    if (ev.has_feat) {
      snap.feat_norm = VecX::Zero(n);
      for (int q = 0; q < n; ++q)
        if (ev.feat.active[q]) snap.feat_norm[q] = ev.feat.residual[q].norm();
    }
  }
  return out;
}

}  // namespace mfba

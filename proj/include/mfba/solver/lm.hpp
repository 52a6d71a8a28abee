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

#include "mfba/solver/schur.hpp"

namespace mfba {

struct StateDelta {
  VecX dense;                // pose/motion update, BlockLayout order
  std::vector<VecX> depth;   // per frame, may be empty for no depth update

  double norm() const {
    double s = dense.squaredNorm();
    for (const VecX& d : depth) s += d.squaredNorm();
    return std::sqrt(s);
  }
};

/// Manifold update: poses right-decoupled, motions additive, inverse depth
/// additive with positivity clamp. Frozen variables are not touched.
inline StateVector retract(const StateVector& state, const StateDelta& delta,
                           const GaugeSpec& gauge) {
  BlockLayout layout{state.size(), state.has_motion()};
  require(delta.dense.size() == layout.dense_dim(),
          "retract: delta dimension mismatch");
  StateVector out = state;
  for (int k = 0; k < state.size(); ++k) {
    if (gauge.pose_frozen(k)) continue;
    const Vec6 d = delta.dense.segment<6>(layout.pose_offset(k));
    if (!d.isZero(0.0)) out.poses[k] = state.poses[k].retract(d);
    if (state.has_motion()) {
      const Vec9 m = delta.dense.segment<9>(layout.motion_offset(k));
      out.motions[k].v += m.head<3>();
      out.motions[k].ba += m.segment<3>(3);
      out.motions[k].bg += m.tail<3>();
    }
  }
  if (!gauge.freeze_all_depths && !delta.depth.empty()) {
    require(delta.depth.size() == state.depths.size(),
            "retract: depth delta mismatch");
    for (int f = 0; f < state.size(); ++f) {
      if (delta.depth[f].size() == 0) continue;
      require(delta.depth[f].size() == state.depths[f].inv_depth.size(),
              "retract: depth delta mismatch on frame " + std::to_string(f));
      out.depths[f].inv_depth =
          (state.depths[f].inv_depth + delta.depth[f])
              .cwiseMax(kMinInverseDepth);
    }
  }
  return out;
}

struct LmIteration {
  int iteration = 0;
  bool accepted = false;
  double cost_reproj = 0.0;
  double cost_feat = 0.0;
  double cost_inertial = 0.0;
  double cost_prior = 0.0;
  double cost_total = 0.0;
  double mean_w_r = 0.0;
  double mean_w_f = 0.0;
  double w_u = 0.0;
  double lambda = 0.0;
  double step_norm = 0.0;
};

struct LmResult {
  StateVector state;
  std::vector<LmIteration> trace;
  double final_cost = 0.0;
  bool converged = false;
  bool hit_max_iterations = false;
  std::string stop_reason;
};

inline double gauge_prior_cost(const GaugeSpec& gauge,
                               const StateVector& state,
                               const StateVector& reference) {
  if (!gauge.freeze_scale || gauge.freeze_all_depths) return 0.0;
  const int f = gauge.anchor_depth_frame;
  return gauge.scale_prior_weight *
         (state.depths[f].inv_depth - reference.depths[f].inv_depth)
             .squaredNorm();
}

/// Levenberg-Marquardt over the frame-graph objective. Per outer iteration:
/// query providers, evaluate all terms, assemble, damp additively, solve by
/// Schur elimination, retract, and accept or reject by total cost under the
/// iteration's fixed confidence maps. One trace row per damping attempt.
inline LmResult lm_solve(const Problem& problem, const StateVector& init,
                         const GaugeSpec& gauge, const LmConfig& cfg) {
  cfg.validate();
  LmResult result;
  result.state = init;
  const StateVector reference = init;  // scale-prior anchor
  std::vector<ResidualSnapshot> snapshots;
  double lambda = cfg.lambda0;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const ConfidenceSet conf = query_confidence(problem, it, snapshots);
    const EvaluatedTerms terms = evaluate_terms(problem, result.state, conf);
    snapshots = residual_snapshots(problem, terms);

    LinearSystem sys = build_system(problem, result.state, terms);
    apply_gauge(sys, gauge, result.state, reference);
    const double current_total = terms.factor_cost() + sys.prior_cost;
    if (!std::isfinite(current_total))
      throw std::runtime_error("lm_solve: non-finite cost at iteration " +
                               std::to_string(it));
    result.final_cost = current_total;

    auto log_row = [&](bool accepted, const EvaluatedTerms& t, double prior,
                       double step) {
      LmIteration row;
      row.iteration = it;
      row.accepted = accepted;
      row.cost_reproj = t.cost_reproj;
      row.cost_feat = t.cost_feat;
      row.cost_inertial = t.cost_inertial;
      row.cost_prior = prior;
      row.cost_total = t.factor_cost() + prior;
      row.mean_w_r = conf.mean_w_r();
      row.mean_w_f = conf.mean_w_f();
      row.w_u = conf.w_u;
      row.lambda = lambda;
      row.step_norm = step;
      result.trace.push_back(row);
    };

    bool accepted = false;
    while (!accepted) {
      const SchurResult sr = schur_solve(sys, lambda);
      if (!sr.ok) {
        log_row(false, terms, sys.prior_cost, 0.0);
        lambda *= cfg.lambda_up;
        if (lambda > cfg.lambda_max) {
          result.stop_reason = sr.rank_deficient
                                   ? "rank-deficient system at lambda_max"
                                   : "lambda_max reached";
          return result;
        }
        continue;
      }

      StateDelta delta{sr.dx_dense, sr.dx_depth};
      const double step = delta.norm();
      if (step < cfg.step_tolerance) {
        log_row(false, terms, sys.prior_cost, step);
        result.converged = true;
        result.stop_reason = "step below tolerance";
        return result;
      }

      const StateVector candidate = retract(result.state, delta, gauge);
      const EvaluatedTerms cand_terms =
          evaluate_terms(problem, candidate, conf);
      const double cand_prior =
          gauge_prior_cost(gauge, candidate, reference);
      const double cand_total = cand_terms.factor_cost() + cand_prior;

      if (std::isfinite(cand_total) && cand_total < current_total) {
        accepted = true;
        result.state = candidate;
        result.final_cost = cand_total;
        snapshots = residual_snapshots(problem, cand_terms);
        log_row(true, cand_terms, cand_prior, step);
        lambda = std::max(lambda * cfg.lambda_down, 1e-12);
        if (current_total - cand_total <=
            cfg.cost_tolerance * std::max(current_total, 1e-300)) {
          result.converged = true;
          result.stop_reason = "cost decrease below tolerance";
          return result;
        }
      } else {
        log_row(false, terms, sys.prior_cost, step);
        lambda *= cfg.lambda_up;
        if (lambda > cfg.lambda_max) {
          result.stop_reason = "lambda_max reached";
          return result;
        }
      }
    }
  }
  result.hit_max_iterations = true;
  result.stop_reason = "max iterations";
  return result;
}

}  // namespace mfba

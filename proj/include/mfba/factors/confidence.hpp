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

#include <variant>

#include "mfba/factors/data.hpp"

namespace mfba {

/// Residual magnitudes of the previous iteration, used by the adaptive
/// policy. Empty on the first iteration.
struct ResidualSnapshot {
  VecX reproj_norm;  // per lattice pixel
  VecX feat_norm;    // per lattice pixel
};

/// Confidence policies stand in for the learned confidence branches.

/// Constant confidence everywhere.
struct UniformConfidence {
  double value = 1.0;
};

/// Ground-truth inlier mask: outlier pixels get zero re-projection weight.
struct OracleConfidence {
  std::vector<uint8_t> inlier;
  double w_u = 1.0;
};

/// Iteration schedule: the re-projection weight dominates early while the
/// feature-metric weight ramps from zero to a plateau slightly above it
/// (final mean ratio f_end / r_end ~= 1.1).
struct ScheduledConfidence {
  double r_start = 0.9;
  double r_end = 0.7;
  double f_end = 0.77;
  double w_u = 1.0;
  int ramp_iters = 8;
};

/// Huber-style down-weighting of large residuals from the last snapshot.
struct AdaptiveConfidence {
  double scale_r = 1.0;   // pixels
  double scale_f = 0.05;  // feature units
  double w_u = 1.0;
};

using ConfidenceProvider = std::variant<UniformConfidence, OracleConfidence,
                                        ScheduledConfidence,
                                        AdaptiveConfidence>;

inline ConfidenceMaps provide_confidence(const ConfidenceProvider& provider,
                                         int iteration,
                                         const ResidualSnapshot& snapshot,
                                         int n_pixels) {
  require(iteration >= 0, "provide_confidence: negative iteration");

  struct Visitor {
    int iteration;
    const ResidualSnapshot& snap;
    int n;

    ConfidenceMaps operator()(const UniformConfidence& u) const {
      return ConfidenceMaps::Uniform(n, u.value);
    }

    ConfidenceMaps operator()(const OracleConfidence& o) const {
      require(static_cast<int>(o.inlier.size()) == n,
              "OracleConfidence: mask size mismatch");
      ConfidenceMaps m = ConfidenceMaps::Uniform(n, 1.0);
      for (int q = 0; q < n; ++q)
        if (!o.inlier[q]) m.w_r[q].setZero();
      m.w_u = std::clamp(o.w_u, 0.0, kConfidenceCap);
      return m;
    }

    ConfidenceMaps operator()(const ScheduledConfidence& s) const {
      const double t =
          std::min(1.0, static_cast<double>(iteration) /
                            std::max(1, s.ramp_iters));
      const double ramp = t * t * (3.0 - 2.0 * t);  // smoothstep
      ConfidenceMaps m;
      const double wr = std::clamp(s.r_start + (s.r_end - s.r_start) * ramp,
                                   0.0, kConfidenceCap);
      const double wf = std::clamp(s.f_end * ramp, 0.0, kConfidenceCap);
      m.w_r.assign(n, Vec2::Constant(wr));
      m.w_f = VecX::Constant(n, wf);
      m.w_u = std::clamp(s.w_u, 0.0, kConfidenceCap);
      return m;
    }

    ConfidenceMaps operator()(const AdaptiveConfidence& a) const {
      ConfidenceMaps m = ConfidenceMaps::Uniform(n, 1.0);
      if (snap.reproj_norm.size() == n) {
        for (int q = 0; q < n; ++q) {
          const double r = snap.reproj_norm[q];
          if (r > a.scale_r) m.w_r[q].setConstant(a.scale_r / r);
        }
      }
      if (snap.feat_norm.size() == n) {
        for (int q = 0; q < n; ++q) {
          const double r = snap.feat_norm[q];
          if (r > a.scale_f) m.w_f[q] = a.scale_f / r;
        }
      }
      m.w_u = std::clamp(a.w_u, 0.0, kConfidenceCap);
      return m;
    }
  };

  return std::visit(Visitor{iteration, snapshot, n_pixels}, provider);
}

}  // namespace mfba

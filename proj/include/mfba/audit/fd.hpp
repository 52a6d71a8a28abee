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

#include <functional>

#include "mfba/core/types.hpp"

namespace mfba {

/// Central finite differences of f around zero perturbation, column by
/// column. f maps an n-dim perturbation to an m-dim value.
inline MatX finite_difference_jacobian(
    const std::function<VecX(const VecX&)>& f, int n, double step = 1e-6) {
  VecX zero = VecX::Zero(n);
  const VecX f0 = f(zero);
  MatX J(f0.size(), n);
  for (int c = 0; c < n; ++c) {
    VecX dp = VecX::Zero(n);
    dp[c] = step;
    VecX dm = VecX::Zero(n);
    dm[c] = -step;
    J.col(c) = (f(dp) - f(dm)) / (2.0 * step);
  }
  return J;
}

/// Max elementwise deviation scaled by the larger of 1 and the largest
/// analytic entry, so zero blocks are compared absolutely.
inline double jacobian_rel_error(const MatX& analytic, const MatX& fd) {
  const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

}  // namespace mfba

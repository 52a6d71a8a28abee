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

namespace mfba {

/// Predicted target coordinates per lattice pixel of the source frame,
/// in full-resolution pixels of the target frame.
struct CorrespondenceField {
  int cols = 0, rows = 0;
  std::vector<Vec2> target;
  std::vector<uint8_t> valid;

  CorrespondenceField() = default;
  CorrespondenceField(int rows_, int cols_)
      : cols(cols_), rows(rows_),
        target(static_cast<size_t>(rows_) * cols_, Vec2::Zero()),
        valid(static_cast<size_t>(rows_) * cols_, 0) {}

  int size() const { return rows * cols; }
  bool matches(const PixelGrid& grid) const {
    return rows == grid.rows && cols == grid.cols;
  }
};

// Confidences are sigmoid-range by construction; providers clamp here.
inline constexpr double kConfidenceCap = 1.0;

/// Per-pixel weights of the visual terms plus the per-edge scalar for the
/// inertial term. All entries in [0, kConfidenceCap].
struct ConfidenceMaps {
  std::vector<Vec2> w_r;  // re-projection, x/y weighted separately
  VecX w_f;               // feature-metric, shared across channels
  double w_u = 1.0;       // inertial edge confidence

  int size() const { return static_cast<int>(w_r.size()); }

  static ConfidenceMaps Uniform(int n, double value) {
    ConfidenceMaps m;
    const double v = std::clamp(value, 0.0, kConfidenceCap);
    m.w_r.assign(n, Vec2::Constant(v));
    m.w_f = VecX::Constant(n, v);
    m.w_u = v;
    return m;
  }

  double mean_w_r() const {
    if (w_r.empty()) return 0.0;
    double s = 0.0;
    for (const Vec2& w : w_r) s += 0.5 * (w.x() + w.y());
    return s / static_cast<double>(w_r.size());
  }
  double mean_w_f() const { return w_f.size() ? w_f.mean() : 0.0; }
};

/// Dense per-pixel feature image at full resolution with bilinear sampling
/// and bilinearly interpolated central-difference gradients. Layout is
/// row-major, channel-interleaved.
struct FeatureMap {
  int width = 0, height = 0, channels = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int w, int h, int c)
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, 0.0) {}

  double& at(int x, int y, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  /// Margin needed so that both the sample and its gradient stencil stay
  /// inside the image.
  bool in_bounds(const Vec2& u, double margin = 1.0) const {
    return u.x() >= margin && u.x() <= width - 1 - margin &&
           u.y() >= margin && u.y() <= height - 1 - margin;
  }

  VecX sample(const Vec2& u) const {
    const int x0 = static_cast<int>(std::floor(u.x()));
    const int y0 = static_cast<int>(std::floor(u.y()));
    const double fx = u.x() - x0, fy = u.y() - y0;
    VecX out = VecX::Zero(channels);
    for (int c = 0; c < channels; ++c) {
      out[c] = (1 - fx) * (1 - fy) * at(x0, y0, c) +
               fx * (1 - fy) * at(x0 + 1, y0, c) +
               (1 - fx) * fy * at(x0, y0 + 1, c) +
               fx * fy * at(x0 + 1, y0 + 1, c);
    }
    return out;
  }

  /// C x 2 spatial gradient: central differences on the grid, bilinearly
  /// interpolated at u. Caller must respect in_bounds(u, 1).
  MatX sample_gradient(const Vec2& u) const {
    const int x0 = static_cast<int>(std::floor(u.x()));
    const int y0 = static_cast<int>(std::floor(u.y()));
    const double fx = u.x() - x0, fy = u.y() - y0;
    MatX g = MatX::Zero(channels, 2);
    auto gx = [&](int x, int y, int c) {
      return 0.5 * (at(x + 1, y, c) - at(x - 1, y, c));
    };
    auto gy = [&](int x, int y, int c) {
      return 0.5 * (at(x, y + 1, c) - at(x, y - 1, c));
    };
    for (int c = 0; c < channels; ++c) {
      g(c, 0) = (1 - fx) * (1 - fy) * gx(x0, y0, c) +
                fx * (1 - fy) * gx(x0 + 1, y0, c) +
                (1 - fx) * fy * gx(x0, y0 + 1, c) +
                fx * fy * gx(x0 + 1, y0 + 1, c);
      g(c, 1) = (1 - fx) * (1 - fy) * gy(x0, y0, c) +
                fx * (1 - fy) * gy(x0 + 1, y0, c) +
                (1 - fx) * fy * gy(x0, y0 + 1, c) +
                fx * fy * gy(x0 + 1, y0 + 1, c);
    }
    return g;
  }
};

}  // namespace mfba

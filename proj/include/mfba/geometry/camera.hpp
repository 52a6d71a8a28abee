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

#include "mfba/core/types.hpp"

namespace mfba {

/// Pinhole model, no distortion. Distortion handling is an extension
/// point: plug a rectifying remap in front of the engine.
struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx_, double fy_, double cx_, double cy_, int w,
                   int h)
      : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(w), height(h) {
    require(fx > 0.0 && fy > 0.0, "CameraIntrinsics: focal lengths must be > 0");
    require(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height,
            "CameraIntrinsics: principal point outside image");
  }

  Vec2 project(const Vec3& xc) const {
    return Vec2(fx * xc.x() / xc.z() + cx, fy * xc.y() / xc.z() + cy);
  }

  /// Unit-depth ray through pixel u.
  Vec3 unproject(const Vec2& u) const {
    return Vec3((u.x() - cx) / fx, (u.y() - cy) / fy, 1.0);
  }

  bool in_image(const Vec2& u, double margin = 0.0) const {
    return u.x() >= margin && u.x() <= width - 1 - margin && u.y() >= margin &&
           u.y() <= height - 1 - margin;
  }
};

/// Row-major lattice of full-resolution pixel coordinates at the depth-grid
/// resolution. Lattice cell (r, c) sits at the center of its stride x stride
/// block: pixel (c*stride + (stride-1)/2, r*stride + (stride-1)/2).
struct PixelGrid {
  int stride = 1;
  int cols = 0, rows = 0;
  std::vector<Vec2> coords;  // rows*cols, row-major

  PixelGrid() = default;
  PixelGrid(const CameraIntrinsics& K, int stride_) : stride(stride_) {
    require(stride >= 1, "PixelGrid: stride must be >= 1");
    cols = K.width / stride;
    rows = K.height / stride;
    require(cols > 0 && rows > 0, "PixelGrid: image smaller than stride");
    const double off = (stride - 1) / 2.0;
    coords.reserve(static_cast<size_t>(cols) * rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        coords.emplace_back(c * stride + off, r * stride + off);
  }

  int size() const { return rows * cols; }
  const Vec2& at(int q) const { return coords[q]; }
};

/// Dense per-pixel inverse depth (1/m) on the lattice of a PixelGrid.
struct DepthGrid {
  int cols = 0, rows = 0;
  VecX inv_depth;  // rows*cols, row-major, all entries > 0

  DepthGrid() = default;
  DepthGrid(int rows_, int cols_, double init)
      : cols(cols_), rows(rows_), inv_depth(VecX::Constant(rows_ * cols_, init)) {
    require(init > 0.0, "DepthGrid: inverse depth must be positive");
  }

  int size() const { return rows * cols; }
  double at(int q) const { return inv_depth[q]; }

  bool matches(const PixelGrid& grid) const {
    return rows == grid.rows && cols == grid.cols;
  }
};

}  // namespace mfba

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

#include <random>

#include "mfba/factors/data.hpp"
#include "mfba/geometry/projection.hpp"

namespace mfba {

/// Textured hollow sphere viewed from inside. Every camera ray has exactly
/// one intersection with the shell, so depth, correspondences, and feature
/// maps are closed-form, multi-view consistent, and exactly differentiable.
/// The feature texture is a band-limited sum of 3D sinusoids evaluated on
/// the shell, which keeps the interpolation error analyzable.
struct SceneSpec {
  Vec3 sphere_center = Vec3::Zero();
  double sphere_radius = 5.0;  // m; cameras must stay strictly inside
  int feature_dim = 8;
  int feature_waves = 50;
  double feature_max_wavenumber = 1.0;  // rad/m
  double feature_amplitude = 1.0;       // total per-channel scale
  double feature_noise_sigma = 0.0;     // per-view additive noise
  double outlier_fraction = 0.0;        // correspondence corruption
  double pixel_noise_sigma = 0.0;       // full-res px, on targets
  uint64_t seed = 0;

  void validate() const {
    require(sphere_radius > 0.0, "SceneSpec: sphere radius must be > 0");
    require(outlier_fraction >= 0.0 && outlier_fraction < 1.0,
            "SceneSpec: outlier fraction must be in [0,1)");
    require(feature_dim >= 1, "SceneSpec: feature dim >= 1");
  }
};

class SphereScene {
 public:
  SphereScene(const SceneSpec& spec, const CameraIntrinsics& K)
      : spec_(spec), K_(K), grid_(K, 8) {
    spec.validate();
    std::mt19937_64 rng(spec.seed ^ 0x5deece66dULL);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int W = spec.feature_waves;
    wave_k_.resize(W);
    wave_amp_.resize(W, VecX::Zero(spec.feature_dim));
    wave_phase_.resize(W, VecX::Zero(spec.feature_dim));
    const double amp = spec.feature_amplitude / std::sqrt(double(W));
    for (int w = 0; w < W; ++w) {
      Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
      dir.normalize();
      wave_k_[w] = dir * (spec.feature_max_wavenumber * (0.2 + 0.8 * u01(rng)));
      for (int c = 0; c < spec.feature_dim; ++c) {
        wave_amp_[w][c] = amp * (2.0 * u01(rng) - 1.0) * 1.7;
        wave_phase_[w][c] = 2.0 * M_PI * u01(rng);
      }
    }
  }

  const SceneSpec& spec() const { return spec_; }
  const CameraIntrinsics& intrinsics() const { return K_; }
  const PixelGrid& grid() const { return grid_; }

  /// z-depth of the shell along the (unnormalized, z=1) camera ray.
  double ray_depth(const Pose& T_wc, const Vec3& ray_cam) const {
    const Vec3 m = T_wc.R * ray_cam;
    const Vec3 oc = T_wc.p - spec_.sphere_center;
    const double a = m.squaredNorm();
    const double b = m.dot(oc);
    const double c = oc.squaredNorm() - spec_.sphere_radius * spec_.sphere_radius;
    const double disc = b * b - a * c;
    require(c < 0.0, "SphereScene: camera left the sphere interior");
    return (-b + std::sqrt(disc)) / a;  // c < 0 guarantees a positive root
  }

  Vec3 surface_point(const Pose& T_wc, const Vec2& pixel) const {
    const Vec3 ray = K_.unproject(pixel);
    return T_wc.act(ray * ray_depth(T_wc, ray));
  }

  /// Band-limited feature field at a world point.
  VecX feature(const Vec3& x) const {
    VecX f = VecX::Zero(spec_.feature_dim);
    for (size_t w = 0; w < wave_k_.size(); ++w) {
      const double ph = wave_k_[w].dot(x);
      for (int c = 0; c < spec_.feature_dim; ++c)
        f[c] += wave_amp_[w][c] * std::sin(ph + wave_phase_[w][c]);
    }
    return f;
  }

  DepthGrid depth_grid(const Pose& T_wc) const {
    DepthGrid d(grid_.rows, grid_.cols, 1.0);
    for (int q = 0; q < grid_.size(); ++q) {
      const Vec3 ray = K_.unproject(grid_.at(q));
      d.inv_depth[q] = 1.0 / ray_depth(T_wc, ray);
    }
    return d;
  }

  /// Noiseless feature image of a view (analytic field sampled per pixel).
  FeatureMap feature_map(const Pose& T_wc) const {
    FeatureMap F(K_.width, K_.height, spec_.feature_dim);
    for (int y = 0; y < K_.height; ++y) {
      for (int x = 0; x < K_.width; ++x) {
        const VecX f = feature(surface_point(T_wc, Vec2(x, y)));
        for (int c = 0; c < spec_.feature_dim; ++c) F.at(x, y, c) = f[c];
      }
    }
    return F;
  }

  /// Feature image with seeded per-view noise.
  FeatureMap feature_map_noisy(const Pose& T_wc, int frame_id) const {
    FeatureMap F = feature_map(T_wc);
    if (spec_.feature_noise_sigma > 0.0) {
      std::mt19937_64 rng(mix_seed(frame_id, 0x7ea7));
      std::normal_distribution<double> gauss(0.0, spec_.feature_noise_sigma);
      for (double& v : F.data) v += gauss(rng);
    }
    return F;
  }

  struct Correspondences {
    CorrespondenceField field;
    std::vector<uint8_t> inlier;  // 0 where an outlier was injected
  };

  /// Exact projection of frame i's lattice surface points into frame j,
  /// then seeded corruption: outlier targets replaced by uniform in-image
  /// coordinates (recorded in the mask), Gaussian noise on the rest.
  Correspondences correspondences(const Pose& T_wc_i, const Pose& T_wc_j,
                                  int id_i, int id_j) const {
    Correspondences out;
    out.field = CorrespondenceField(grid_.rows, grid_.cols);
    out.inlier.assign(grid_.size(), 1);

    std::mt19937_64 rng(mix_seed(id_i, id_j));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const Pose T_ji = T_wc_j.inverse() * T_wc_i;
    for (int q = 0; q < grid_.size(); ++q) {
      const Vec3 ray = K_.unproject(grid_.at(q));
      const Vec3 xj = T_ji.act(ray * ray_depth(T_wc_i, ray));
      if (xj.z() <= kMinTargetDepth) continue;  // cannot happen inside shell
      Vec2 target = K_.project(xj);
      if (spec_.outlier_fraction > 0.0 && u01(rng) < spec_.outlier_fraction) {
        target = Vec2(u01(rng) * (K_.width - 1), u01(rng) * (K_.height - 1));
        out.inlier[q] = 0;
      } else if (spec_.pixel_noise_sigma > 0.0) {
        target += spec_.pixel_noise_sigma * Vec2(gauss(rng), gauss(rng));
      }
      out.field.target[q] = target;
      out.field.valid[q] = 1;
    }
    return out;
  }

 private:
  uint64_t mix_seed(uint64_t a, uint64_t b) const {
    uint64_t h = spec_.seed ^ 0x9e3779b97f4a7c15ULL;
    h ^= (a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    h ^= (b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    return h;
  }

  SceneSpec spec_;
  CameraIntrinsics K_;
  PixelGrid grid_;
  std::vector<Vec3> wave_k_;
  std::vector<VecX> wave_amp_;
  std::vector<VecX> wave_phase_;
};

}  // namespace mfba

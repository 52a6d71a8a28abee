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

#include "mfba/geometry/pose.hpp"

namespace mfba {

/// Orientation as a rotation-vector path R(t) = Exp(theta(t)) with
/// theta(t) = theta0 + rate*t + sum_k amp_k .* sin(freq_k*t + phase_k).
/// The body angular rate follows analytically as Jr(theta) * theta_dot.
struct RotationPath {
  Vec3 theta0 = Vec3::Zero();
  Vec3 rate = Vec3::Zero();
  std::vector<Vec3> amp, freq, phase;

  Vec3 theta(double t) const {
    Vec3 th = theta0 + rate * t;
    for (size_t k = 0; k < amp.size(); ++k)
      th += amp[k].cwiseProduct(
          (freq[k] * t + phase[k]).array().sin().matrix());
    return th;
  }

  Vec3 theta_dot(double t) const {
    Vec3 d = rate;
    for (size_t k = 0; k < amp.size(); ++k)
      d += amp[k].cwiseProduct(freq[k]).cwiseProduct(
          (freq[k] * t + phase[k]).array().cos().matrix());
    return d;
  }
};

enum class CurveKind { kStatic, kCircle, kLissajous, kSpline };

struct TrajectorySpec {
  CurveKind kind = CurveKind::kCircle;
  double duration = 10.0;    // s
  double frame_rate = 10.0;  // Hz
  double imu_rate = 200.0;   // Hz

  Vec3 center = Vec3::Zero();

  // circle
  double radius = 1.0;
  double angular_rate = 1.0;  // rad/s

  // lissajous (per-axis sinusoids around center)
  Vec3 amplitude = Vec3(1.0, 0.7, 0.3);
  Vec3 frequency = Vec3(1.0, 1.3, 1.7);  // rad/s
  Vec3 phase = Vec3(0.0, 1.1, 2.3);

  // spline (natural cubic through waypoints, uniform in time)
  std::vector<Vec3> waypoints;

  RotationPath orientation;

  void validate() const {
    require(duration > 0.0 && frame_rate > 0.0, "TrajectorySpec: rates > 0");
    require(imu_rate >= 10.0 * frame_rate,
            "TrajectorySpec: imu rate must be >= 10x frame rate");
    if (kind == CurveKind::kSpline) {
      require(waypoints.size() >= 4,
              "TrajectorySpec: spline needs at least 4 waypoints");
      for (const Vec3& w : waypoints)
        require(w.allFinite(), "TrajectorySpec: non-finite waypoint");
    }
  }

  /// Circle in the xy-plane with tangent-following yaw.
  static TrajectorySpec Circle(double radius, double angular_rate,
                               double duration, double frame_rate = 10.0,
                               double imu_rate = 200.0) {
    TrajectorySpec s;
    s.kind = CurveKind::kCircle;
    s.radius = radius;
    s.angular_rate = angular_rate;
    s.duration = duration;
    s.frame_rate = frame_rate;
    s.imu_rate = imu_rate;
    s.orientation.theta0 = Vec3(0, 0, M_PI / 2.0);
    s.orientation.rate = Vec3(0, 0, angular_rate);
    return s;
  }

  static TrajectorySpec Static(double duration, double frame_rate = 10.0,
                               double imu_rate = 200.0) {
    TrajectorySpec s;
    s.kind = CurveKind::kStatic;
    s.duration = duration;
    s.frame_rate = frame_rate;
    s.imu_rate = imu_rate;
    return s;
  }
};

struct TrajectorySample {
  double t = 0.0;
  Pose T_wb;                     // body pose
  Vec3 v_w = Vec3::Zero();       // world velocity
  Vec3 a_w = Vec3::Zero();       // world acceleration
  Vec3 omega_b = Vec3::Zero();   // body angular rate
};

namespace detail {

/// Natural cubic spline with uniform knots; value and two derivatives are
/// analytic polynomials per segment.
class NaturalCubic {
 public:
  NaturalCubic() = default;
  NaturalCubic(const std::vector<double>& y, double t0, double dt)
      : y_(y), t0_(t0), dt_(dt) {
    const int n = static_cast<int>(y.size());
    m_.assign(n, 0.0);
    if (n < 3) return;
    // tridiagonal solve for second derivatives (natural ends)
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
      a[i] = dt / 6.0;
      b[i] = 2.0 * dt / 3.0;
      c[i] = dt / 6.0;
      d[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / dt;
    }
    for (int i = 2; i + 1 < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    for (int i = n - 2; i >= 1; --i)
      m_[i] = (d[i] - c[i] * (i + 2 < n ? m_[i + 1] : 0.0)) / b[i];
  }

  void eval(double t, double* v, double* d1, double* d2) const {
    const int n = static_cast<int>(y_.size());
    double s = (t - t0_) / dt_;
    int i = std::clamp(static_cast<int>(std::floor(s)), 0, n - 2);
    const double x = (s - i) * dt_;  // local coordinate in [0, dt]
    const double h = dt_;
    const double A = (h - x) / h, B = x / h;
    *v = A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
    *d1 = (y_[i + 1] - y_[i]) / h -
          (3.0 * A * A - 1.0) * h / 6.0 * m_[i] +
          (3.0 * B * B - 1.0) * h / 6.0 * m_[i + 1];
    *d2 = A * m_[i] + B * m_[i + 1];
  }

 private:
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at knots
  double t0_ = 0.0, dt_ = 1.0;
};

}  // namespace detail

/// Analytic C2 trajectory; derivatives come from the closed-form curve,
/// never from finite differences.
class SyntheticTrajectory {
 public:
  explicit SyntheticTrajectory(const TrajectorySpec& spec) : spec_(spec) {
    spec.validate();
    if (spec.kind == CurveKind::kSpline) {
      const int n = static_cast<int>(spec.waypoints.size());
      const double dt = spec.duration / (n - 1);
      for (int axis = 0; axis < 3; ++axis) {
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) y[i] = spec.waypoints[i][axis];
        spline_[axis] = detail::NaturalCubic(y, 0.0, dt);
      }
    }
  }

  const TrajectorySpec& spec() const { return spec_; }

  TrajectorySample at(double t) const {
    TrajectorySample s;
    s.t = t;
    switch (spec_.kind) {
      case CurveKind::kStatic:
        s.T_wb.p = spec_.center;
        break;
      case CurveKind::kCircle: {
        const double w = spec_.angular_rate, r = spec_.radius;
        const double cs = std::cos(w * t), sn = std::sin(w * t);
        s.T_wb.p = spec_.center + Vec3(r * cs, r * sn, 0.0);
        s.v_w = Vec3(-r * w * sn, r * w * cs, 0.0);
        s.a_w = Vec3(-r * w * w * cs, -r * w * w * sn, 0.0);
        break;
      }
      case CurveKind::kLissajous: {
        for (int k = 0; k < 3; ++k) {
          const double A = spec_.amplitude[k], w = spec_.frequency[k],
                       ph = spec_.phase[k];
          s.T_wb.p[k] = spec_.center[k] + A * std::sin(w * t + ph);
          s.v_w[k] = A * w * std::cos(w * t + ph);
          s.a_w[k] = -A * w * w * std::sin(w * t + ph);
        }
        break;
      }
      case CurveKind::kSpline: {
        for (int k = 0; k < 3; ++k)
          spline_[k].eval(t, &s.T_wb.p[k], &s.v_w[k], &s.a_w[k]);
        break;
      }
    }
    const Vec3 th = spec_.orientation.theta(t);
    s.T_wb.R = so3_exp(th);
    s.omega_b = so3_right_jacobian(th) * spec_.orientation.theta_dot(t);
    return s;
  }

  std::vector<double> frame_times() const {
    return times(spec_.frame_rate);
  }
  std::vector<double> imu_times() const { return times(spec_.imu_rate); }

 private:
  std::vector<double> times(double rate) const {
    std::vector<double> out;
    const int n = static_cast<int>(std::round(spec_.duration * rate));
    out.reserve(n + 1);
    for (int k = 0; k <= n; ++k) out.push_back(k / rate);
    return out;
  }

  TrajectorySpec spec_;
  detail::NaturalCubic spline_[3];
};

inline SyntheticTrajectory gen_trajectory(const TrajectorySpec& spec) {
  return SyntheticTrajectory(spec);
}

}  // namespace mfba

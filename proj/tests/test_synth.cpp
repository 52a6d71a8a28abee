#include <catch2/catch_amalgamated.hpp>

#include "mfba/factors/reprojection.hpp"
#include "mfba/imu/preintegration.hpp"
#include "mfba/synth/imu_sim.hpp"
#include "mfba/synth/scene.hpp"

using namespace mfba;

namespace {

CameraIntrinsics test_camera() { return {40.0, 42.0, 31.5, 31.5, 64, 64}; }

TrajectorySpec excited_lissajous() {
  TrajectorySpec s;
  s.kind = CurveKind::kLissajous;
  s.duration = 4.0;
  s.amplitude = Vec3(0.8, 0.6, 0.4);
  s.frequency = Vec3(1.0, 1.4, 1.9);
  s.orientation.rate = Vec3(0.0, 0.0, 0.3);
  s.orientation.amp = {Vec3(0.15, 0.2, 0.1)};
  s.orientation.freq = {Vec3(1.2, 0.9, 1.5)};
  s.orientation.phase = {Vec3(0.3, 1.0, 2.0)};
  return s;
}

}  // namespace

TEST_CASE("trajectory closed forms") {
  SECTION("circle: acceleration magnitude r*w^2") {
    const double r = 1.5, w = 0.8;
    const SyntheticTrajectory traj =
        gen_trajectory(TrajectorySpec::Circle(r, w, 5.0));
    for (double t : traj.frame_times()) {
      const TrajectorySample s = traj.at(t);
      CHECK(s.a_w.norm() == Catch::Approx(r * w * w).margin(1e-10));
      CHECK(s.omega_b.norm() == Catch::Approx(w).margin(1e-12));
    }
  }

  SECTION("static: all derivatives zero") {
    const SyntheticTrajectory traj =
        gen_trajectory(TrajectorySpec::Static(2.0));
    for (double t : traj.frame_times()) {
      const TrajectorySample s = traj.at(t);
      CHECK(s.v_w.norm() == 0.0);
      CHECK(s.a_w.norm() == 0.0);
      CHECK(s.omega_b.norm() == 0.0);
    }
  }

  SECTION("second differences match analytic acceleration") {
    const SyntheticTrajectory traj = gen_trajectory(excited_lissajous());
    const double h = 1e-3;
    for (double t = 0.1; t < 3.9; t += 0.37) {
      const Vec3 num = (traj.at(t + h).T_wb.p - 2.0 * traj.at(t).T_wb.p +
                        traj.at(t - h).T_wb.p) /
                       (h * h);
      CHECK((num - traj.at(t).a_w).norm() < 1e-4);
    }
  }

  SECTION("angular rate consistent with the rotation path") {
    const SyntheticTrajectory traj = gen_trajectory(excited_lissajous());
    const double h = 1e-4;
    for (double t = 0.1; t < 3.9; t += 0.53) {
      const Mat3 R0 = traj.at(t).T_wb.R;
      const Mat3 R1 = traj.at(t + h).T_wb.R;
      const Vec3 w_mid = traj.at(t + 0.5 * h).omega_b;
      CHECK((so3_log(R0.transpose() * R1) / h - w_mid).norm() < 1e-5);
    }
  }

  SECTION("spline interpolates waypoints and stays C2") {
    TrajectorySpec s;
    s.kind = CurveKind::kSpline;
    s.duration = 3.0;
    s.waypoints = {Vec3(0, 0, 0), Vec3(1, 0.5, 0.2), Vec3(2, -0.3, 0.4),
                   Vec3(2.5, 0.8, -0.1), Vec3(3, 0, 0)};
    const SyntheticTrajectory traj = gen_trajectory(s);
    const double dt = s.duration / 4.0;
    for (int i = 0; i < 5; ++i)
      CHECK((traj.at(i * dt).T_wb.p - s.waypoints[i]).norm() < 1e-12);
    // velocity continuity at an interior knot
    const double h = 1e-6;
    CHECK((traj.at(dt + h).v_w - traj.at(dt - h).v_w).norm() < 1e-4);
  }

  SECTION("degenerate spline input rejected") {
    TrajectorySpec s;
    s.kind = CurveKind::kSpline;
    s.waypoints = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    CHECK_THROWS_AS(gen_trajectory(s), std::invalid_argument);
  }

  SECTION("imu rate must be 10x frame rate") {
    TrajectorySpec s = TrajectorySpec::Circle(1.0, 1.0, 2.0);
    s.imu_rate = 50.0;
    CHECK_THROWS_AS(gen_trajectory(s), std::invalid_argument);
  }
}

TEST_CASE("imu generation") {
  const Vec3 g(0, 0, -9.81);

  SECTION("static equilibrium sample values") {
    const SyntheticTrajectory traj =
        gen_trajectory(TrajectorySpec::Static(1.0));
    const ImuStream stream = gen_imu(traj, g, {});
    for (const ImuSample& s : stream.samples) {
      CHECK((s.accel - Vec3(0, 0, 9.81)).norm() < 1e-12);
      CHECK(s.gyro.norm() == 0.0);
    }
  }

  SECTION("noiseless propagation tracks the trajectory") {
    const SyntheticTrajectory traj = gen_trajectory(excited_lissajous());
    const ImuStream stream = gen_imu(traj, g, {});
    ImuCalib calib;
    calib.gravity = g;

    // 0.5 s windows at 200 Hz
    for (int start = 0; start + 100 < (int)stream.samples.size();
         start += 100) {
      std::span<const ImuSample> seg(stream.samples.data() + start, 101);
      const Preintegrated pre = preintegrate(seg, {}, calib);
      const TrajectorySample s0 = traj.at(seg.front().t);
      const TrajectorySample s1 = traj.at(seg.back().t);
      MotionState M0;
      M0.v = s0.v_w;
      const Propagated prop = propagate(s0.T_wb, M0, pre, calib);
      CHECK((prop.T_wc.p - s1.T_wb.p).norm() < 1e-4);
      CHECK((prop.v - s1.v_w).norm() < 1e-4);
      CHECK(so3_log(prop.T_wc.R.transpose() * s1.T_wb.R).norm() < 1e-5);
    }
  }

  SECTION("doubling the noise doubles the innovation std") {
    const SyntheticTrajectory traj =
        gen_trajectory(TrajectorySpec::Static(500.0, 10.0, 200.0));
    NoiseSpec n1;
    n1.sigma_g = 1e-3;
    n1.sigma_a = 1e-2;
    n1.seed = 3;
    NoiseSpec n2 = n1;
    n2.sigma_g *= 2.0;
    n2.sigma_a *= 2.0;
    n2.seed = 4;

    auto innovation_std = [&](const NoiseSpec& n) {
      const ImuStream s = gen_imu(traj, Vec3(0, 0, -9.81), n);
      double acc_g = 0.0, acc_a = 0.0;
      for (const ImuSample& m : s.samples) {
        acc_g += m.gyro.squaredNorm();
        acc_a += (m.accel - Vec3(0, 0, 9.81)).squaredNorm();
      }
      const double cnt = 3.0 * s.samples.size();
      return std::make_pair(std::sqrt(acc_g / cnt), std::sqrt(acc_a / cnt));
    };

    const auto [g1, a1] = innovation_std(n1);
    const auto [g2, a2] = innovation_std(n2);
    CHECK(g2 / g1 == Catch::Approx(2.0).epsilon(0.1));
    CHECK(a2 / a1 == Catch::Approx(2.0).epsilon(0.1));
  }

  SECTION("bias random walk is recorded in the trace") {
    const SyntheticTrajectory traj =
        gen_trajectory(TrajectorySpec::Static(10.0));
    NoiseSpec n;
    n.sigma_bg_walk = 1e-4;
    n.bg0 = Vec3(0.01, 0, 0);
    n.seed = 9;
    const ImuStream s = gen_imu(traj, Vec3(0, 0, -9.81), n);
    CHECK((s.bias_trace.front().bg - n.bg0).norm() == 0.0);
    CHECK((s.bias_trace.back().bg - n.bg0).norm() > 0.0);
    // noiseless gyro reading equals the walking bias exactly
    CHECK((s.samples.back().gyro - s.bias_trace.back().bg).norm() == 0.0);
  }
}

TEST_CASE("sphere scene views") {
  const CameraIntrinsics K = test_camera();

  SECTION("exact data makes the re-projection term vanish at ground truth") {
    SceneSpec spec;
    spec.seed = 11;
    const SphereScene scene(spec, K);
    const Pose T_i(so3_exp(Vec3(0.1, -0.2, 0.3)), Vec3(0.5, -0.3, 0.2));
    const Pose T_j(so3_exp(Vec3(-0.1, 0.1, 0.5)), Vec3(-0.2, 0.4, -0.3));
    const DepthGrid d = scene.depth_grid(T_i);
    const auto corr = scene.correspondences(T_i, T_j, 0, 1);
    const std::vector<Vec2> w(scene.grid().size(), Vec2::Ones());
    const VisualTermEval ev =
        reprojection_term(T_i, T_j, d, scene.grid(), K, corr.field, w);
    CHECK(ev.valid_count > 0);
    CHECK(ev.cost < 1e-18);
  }

  SECTION("outlier fraction hits the requested rate") {
    SceneSpec spec;
    spec.outlier_fraction = 0.2;
    spec.seed = 12;
    const SphereScene scene(spec, K);
    int total = 0, outliers = 0;
    for (int e = 0; e < 200; ++e) {
      const Pose T_i(so3_exp(Vec3(0, 0, 0.01 * e)), Vec3(0.3, 0, 0));
      const Pose T_j(so3_exp(Vec3(0, 0.01, 0)), Vec3(0, 0.2, 0.1));
      const auto corr = scene.correspondences(T_i, T_j, e, e + 1);
      for (uint8_t in : corr.inlier) {
        ++total;
        outliers += in ? 0 : 1;
      }
    }
    CHECK(std::abs(double(outliers) / total - 0.2) < 0.01);
  }

  SECTION("feature maps are multi-view consistent on band-limited fields") {
    SceneSpec spec;
    spec.feature_max_wavenumber = 0.01;
    spec.feature_amplitude = 0.3;
    spec.feature_dim = 4;
    spec.seed = 13;
    const SphereScene scene(spec, K);
    const Pose T_i = Pose::Identity();
    const Pose T_j(so3_exp(Vec3(0.05, -0.03, 0.1)), Vec3(0.4, 0.2, -0.1));
    const FeatureMap F_i = scene.feature_map(T_i);
    const FeatureMap F_j = scene.feature_map(T_j);
    const auto corr = scene.correspondences(T_i, T_j, 0, 1);
    const PixelGrid& grid = scene.grid();
    double max_err = 0.0;
    int compared = 0;
    for (int q = 0; q < grid.size(); ++q) {
      if (!corr.field.valid[q] || !F_j.in_bounds(corr.field.target[q], 1.0))
        continue;
      const VecX fi = F_i.sample(grid.at(q));
      const VecX fj = F_j.sample(corr.field.target[q]);
      max_err = std::max(max_err, (fi - fj).cwiseAbs().maxCoeff());
      ++compared;
    }
    CHECK(compared > 30);
    CHECK(max_err < 1e-6);
  }

  SECTION("reproducible from (spec, seed)") {
    SceneSpec spec;
    spec.outlier_fraction = 0.1;
    spec.pixel_noise_sigma = 0.5;
    spec.feature_noise_sigma = 0.01;
    spec.seed = 21;
    const SphereScene a(spec, K), b(spec, K);
    const Pose T_i = Pose::Identity();
    const Pose T_j(so3_exp(Vec3(0, 0.02, 0)), Vec3(0.1, 0, 0));
    const auto ca = a.correspondences(T_i, T_j, 3, 4);
    const auto cb = b.correspondences(T_i, T_j, 3, 4);
    for (int q = 0; q < a.grid().size(); ++q)
      CHECK(ca.field.target[q] == cb.field.target[q]);
    const FeatureMap fa = a.feature_map_noisy(T_i, 3);
    const FeatureMap fb = b.feature_map_noisy(T_i, 3);
    CHECK(fa.data == fb.data);
  }

  SECTION("camera outside the shell is rejected") {
    SceneSpec spec;
    spec.sphere_radius = 1.0;
    const SphereScene scene(spec, K);
    const Pose far(Mat3::Identity(), Vec3(5, 0, 0));
    CHECK_THROWS_AS(scene.depth_grid(far), std::invalid_argument);
  }
}

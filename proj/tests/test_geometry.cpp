#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mfba/audit/fd.hpp"
#include "mfba/geometry/projection.hpp"

using namespace mfba;

namespace {

std::mt19937_64 rng(42);

Vec3 random_vec(double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

Vec3 random_axis_angle(double max_angle) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 axis(u(rng), u(rng), u(rng));
  while (axis.norm() < 1e-6) axis = Vec3(u(rng), u(rng), u(rng));
  axis.normalize();
  std::uniform_real_distribution<double> a(0.0, max_angle);
  return axis * a(rng);
}

// Truncated matrix-exponential series, the independent oracle for so3_exp.
Mat3 exp_series(const Vec3& omega, int terms) {
  const Mat3 w = hat(omega);
  Mat3 acc = Mat3::Identity();
  Mat3 pow = Mat3::Identity();
  double fact = 1.0;
  for (int k = 1; k < terms; ++k) {
    pow = (pow * w).eval();
    fact *= k;
    acc += pow / fact;
  }
  return acc;
}

Pose random_pose(double angle = 2.5, double trans = 2.0) {
  return Pose(so3_exp(random_axis_angle(angle)), random_vec(trans));
}

}  // namespace

TEST_CASE("so3_exp basics") {
  CHECK(so3_exp(Vec3::Zero()).isApprox(Mat3::Identity(), 1e-15));

  // quarter turn about x maps (0,1,0) to (0,0,1)
  const Mat3 R = so3_exp(Vec3(M_PI / 2.0, 0.0, 0.0));
  CHECK((R * Vec3(0, 1, 0) - Vec3(0, 0, 1)).norm() < 1e-12);

  // series oracle: tail of a 20-term series stays below 1e-12 for
  // |omega| <= 2; larger angles get a longer series at the same bound
  for (int i = 0; i < 200; ++i) {
    const Vec3 w = random_axis_angle(2.0);
    CHECK((so3_exp(w) - exp_series(w, 20)).cwiseAbs().maxCoeff() < 1e-12);
  }
  for (int i = 0; i < 200; ++i) {
    const Vec3 w = random_axis_angle(M_PI - 1e-6);
    CHECK((so3_exp(w) - exp_series(w, 30)).cwiseAbs().maxCoeff() < 1e-12);
  }

  // Taylor branch continuity across the switch
  const Vec3 tiny(3e-9, -2e-9, 1e-9);
  CHECK((so3_exp(tiny) - exp_series(tiny, 10)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("so3_log round trip") {
  CHECK(so3_log(Mat3::Identity()).norm() == 0.0);

  double max_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 w = random_axis_angle(M_PI - 1e-3);
    max_err = std::max(max_err, (so3_log(so3_exp(w)) - w).norm());
  }
  CHECK(max_err < 1e-9);

  // pi about z: sign of the result is a documented convention choice
  const Vec3 l = so3_log(so3_exp(Vec3(0, 0, M_PI)));
  CHECK(std::abs(std::abs(l.z()) - M_PI) < 1e-9);
  CHECK(l.head<2>().norm() < 1e-9);
}

TEST_CASE("so3 right jacobian") {
  CHECK(so3_right_jacobian(Vec3::Zero()).isApprox(Mat3::Identity(), 1e-15));

  // definition check: Log(Exp(w)^-1 Exp(w + d)) ~= Jr(w) d
  const double step = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Vec3 w = random_axis_angle(2.8);
    const Mat3 Jr = so3_right_jacobian(w);
    Mat3 fd;
    for (int c = 0; c < 3; ++c) {
      Vec3 dp = Vec3::Zero();
      dp[c] = step;
      fd.col(c) = (so3_log(so3_exp(w).transpose() * so3_exp(w + dp)) -
                   so3_log(so3_exp(w).transpose() * so3_exp(w - dp))) /
                  (2.0 * step);
    }
    CHECK(jacobian_rel_error(Jr, fd) < 1e-5);
  }

  // first-order expansion for small angles
  const Vec3 w(1e-4, -2e-4, 5e-5);
  const Mat3 approx = Mat3::Identity() - 0.5 * hat(w);
  CHECK((so3_right_jacobian(w) - approx).cwiseAbs().maxCoeff() <
        2.0 * w.squaredNorm());

  // inverse really inverts
  for (int i = 0; i < 50; ++i) {
    const Vec3 v = random_axis_angle(2.8);
    CHECK((so3_right_jacobian(v) * so3_right_jacobian_inverse(v) -
           Mat3::Identity())
              .norm() < 1e-10);
  }
}

TEST_CASE("pose algebra") {
  const Pose a = random_pose(), b = random_pose(), c = random_pose();

  const Pose ab_c = (a * b) * c;
  const Pose a_bc = a * (b * c);
  CHECK((ab_c.R - a_bc.R).norm() < 1e-12);
  CHECK((ab_c.p - a_bc.p).norm() < 1e-12);

  const Pose e = a * a.inverse();
  CHECK((e.R - Mat3::Identity()).norm() < 1e-9);
  CHECK(e.p.norm() < 1e-9);

  // orthonormality drift over 1e4 compositions, renormalizing every 100
  Pose acc = Pose::Identity();
  const Pose step = Pose(so3_exp(Vec3(1e-3, 2e-3, -1e-3)), Vec3(0.01, 0, 0));
  for (int i = 0; i < 10000; ++i) {
    acc = acc * step;
    if (i % 100 == 99) acc.R = normalize_rotation(acc.R);
  }
  CHECK((acc.R * acc.R.transpose() - Mat3::Identity()).norm() < 1e-7);

  // retraction convention: the translation increment is applied in the
  // local frame
  Vec6 d = Vec6::Zero();
  d.head<3>() = Vec3(0.1, 0, 0);
  const Pose r = a.retract(d);
  CHECK((r.p - (a.p + a.R * Vec3(0.1, 0, 0))).norm() < 1e-15);
  CHECK((r.R - a.R).norm() == 0.0);
}

namespace {

// Scalar per-pixel reference: explicit unproject-transform-project.
bool reference_project(const Pose& T_i, const Pose& T_j, double inv_depth,
                       const Vec2& x, const CameraIntrinsics& K, Vec2* out) {
  if (!(inv_depth > 0.0)) return false;
  const Vec3 ray((x.x() - K.cx) / K.fx, (x.y() - K.cy) / K.fy, 1.0);
  const Vec3 pw = T_i.R * (ray / inv_depth) + T_i.p;
  const Vec3 pj = T_j.R.transpose() * (pw - T_j.p);
  if (pj.z() <= 1e-6) return false;
  *out = Vec2(K.fx * pj.x() / pj.z() + K.cx, K.fy * pj.y() / pj.z() + K.cy);
  return true;
}

CameraIntrinsics test_camera() { return {40.0, 42.0, 31.5, 31.5, 64, 64}; }

}  // namespace

TEST_CASE("projection identities") {
  const CameraIntrinsics K = test_camera();
  const PixelGrid grid(K, 8);
  DepthGrid depth(grid.rows, grid.cols, 0.5);
  for (int q = 0; q < depth.size(); ++q)
    depth.inv_depth[q] = 0.2 + 0.05 * (q % 7);

  SECTION("identity relative pose reproduces the lattice") {
    const Pose T = random_pose();
    const ProjectionField f = project(T, T, depth, grid, K);
    for (int q = 0; q < grid.size(); ++q) {
      REQUIRE(f.valid[q]);
      CHECK((f.pixel[q] - grid.at(q)).norm() < 1e-10);
    }
  }

  SECTION("principal point is fixed under optical-axis translation") {
    // principal point placed exactly on a lattice center
    CameraIntrinsics Kc(40.0, 42.0, 35.5, 27.5, 64, 64);
    PixelGrid g(Kc, 8);
    // lattice point exactly at the principal point
    int q_pp = -1;
    for (int q = 0; q < g.size(); ++q)
      if ((g.at(q) - Vec2(Kc.cx, Kc.cy)).norm() < 1e-12) q_pp = q;
    REQUIRE(q_pp >= 0);
    DepthGrid d(g.rows, g.cols, 0.4);
    const Pose T_i = Pose::Identity();
    const Pose T_j(Mat3::Identity(), Vec3(0, 0, 0.7));
    const ProjectionField f = project(T_i, T_j, d, g, Kc);
    REQUIRE(f.valid[q_pp]);
    CHECK((f.pixel[q_pp] - Vec2(Kc.cx, Kc.cy)).norm() < 1e-12);
  }

  SECTION("matches scalar reference on random instances") {
    for (int trial = 0; trial < 50; ++trial) {
      const Pose T_i = random_pose(0.4, 0.5);
      const Pose T_j = random_pose(0.4, 0.5);
      DepthGrid d(grid.rows, grid.cols, 0.5);
      for (int q = 0; q < d.size(); ++q)
        d.inv_depth[q] = 0.1 + 0.3 * std::abs(std::sin(q * 1.7 + trial));
      const ProjectionField f = project(T_i, T_j, d, grid, K);
      for (int q = 0; q < grid.size(); ++q) {
        Vec2 ref;
        if (!reference_project(T_i, T_j, d.at(q), grid.at(q), K, &ref))
          continue;
        CHECK((f.pixel[q] - ref).norm() < 1e-10);
      }
    }
  }

  SECTION("non-positive inverse depth flags the pixel") {
    DepthGrid d(grid.rows, grid.cols, 0.5);
    d.inv_depth[3] = -0.1;
    d.inv_depth[5] = 0.0;
    const ProjectionField f =
        project(Pose::Identity(), random_pose(0.1, 0.1), d, grid, K);
    CHECK_FALSE(f.valid[3]);
    CHECK_FALSE(f.valid[5]);
  }
}

TEST_CASE("projection jacobians vs finite differences") {
  const CameraIntrinsics K = test_camera();
  const PixelGrid grid(K, 8);

  int checked = 0;
  for (int trial = 0; trial < 80 && checked < 1000; ++trial) {
    const Pose T_i = random_pose(0.15, 0.25);
    const Pose T_j = random_pose(0.15, 0.25);
    DepthGrid d(grid.rows, grid.cols, 0.5);
    for (int q = 0; q < d.size(); ++q)
      d.inv_depth[q] = 0.15 + 0.25 * std::abs(std::cos(q * 0.9 + trial));

    ProjectionJacobians jac;
    const ProjectionField f =
        project_with_jacobians(T_i, T_j, d, grid, K, &jac);

    for (int q = 0; q < grid.size(); q += 7) {
      if (!f.valid[q]) continue;
      auto value = [&](const VecX& delta) -> VecX {
        const Pose Ti = T_i.retract(delta.segment<6>(0));
        const Pose Tj = T_j.retract(delta.segment<6>(6));
        DepthGrid dd = d;
        dd.inv_depth[q] += delta[12];
        const ProjectionField g = project(Ti, Tj, dd, grid, K);
        return g.pixel[q];
      };
      const MatX fd = finite_difference_jacobian(value, 13);
      MatX an(2, 13);
      an << jac.J_Ti[q], jac.J_Tj[q], jac.J_d[q];
      CHECK(jacobian_rel_error(an, fd) < 1e-5);
      ++checked;
    }
  }
  CHECK(checked >= 500);
}

TEST_CASE("projection jacobian limiting cases") {
  const CameraIntrinsics K = test_camera();
  const PixelGrid grid(K, 8);

  SECTION("zero parallax: translation jacobian vanishes with inverse depth") {
    DepthGrid d(grid.rows, grid.cols, 1e-7);
    ProjectionJacobians jac;
    const Pose T_i = Pose::Identity();
    const Pose T_j(so3_exp(Vec3(0.02, -0.01, 0.03)), Vec3(0.2, 0.1, -0.1));
    const ProjectionField f =
        project_with_jacobians(T_i, T_j, d, grid, K, &jac);
    for (int q = 0; q < grid.size(); ++q) {
      if (!f.valid[q]) continue;
      CHECK(jac.J_Ti[q].leftCols<3>().cwiseAbs().maxCoeff() < 1e-4);
      CHECK(jac.J_Tj[q].leftCols<3>().cwiseAbs().maxCoeff() < 1e-4);
    }
  }

  SECTION("identity relative pose: depth jacobian zero iff no translation") {
    DepthGrid d(grid.rows, grid.cols, 0.5);
    ProjectionJacobians jac;
    const Pose T = random_pose();
    project_with_jacobians(T, T, d, grid, K, &jac);
    for (int q = 0; q < grid.size(); ++q)
      CHECK(jac.J_d[q].norm() < 1e-12);

    // same rotation but nonzero translation: depth jacobian must not vanish
    Pose T_j = T;
    T_j.p += T.R * Vec3(0.3, 0.0, 0.0);
    const ProjectionField f =
        project_with_jacobians(T, T_j, d, grid, K, &jac);
    int nonzero = 0;
    for (int q = 0; q < grid.size(); ++q)
      if (f.valid[q] && jac.J_d[q].norm() > 1e-3) ++nonzero;
    CHECK(nonzero > 0);
  }
}

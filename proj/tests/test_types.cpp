#include <doctest.h>

#include "multicup/types.hpp"

using namespace multicup;

TEST_CASE("zyz rotation composes Rz(theta) Ry(phi) Rz(gamma)") {
  const double theta = 0.7, phi = 0.4, gamma = -1.2;
  const Mat3 r = zyz_rotation(theta, phi, gamma);

  const Mat3 manual =
      (Eigen::AngleAxisd(theta, Vec3::UnitZ()) *
       Eigen::AngleAxisd(phi, Vec3::UnitY()) *
       Eigen::AngleAxisd(gamma, Vec3::UnitZ()))
          .toRotationMatrix();
  CHECK((r - manual).norm() == doctest::Approx(0.0).epsilon(1e-12));

  // Third column depends only on (theta, phi).
  const Vec3 axis(std::cos(theta) * std::sin(phi),
                  std::sin(theta) * std::sin(phi), std::cos(phi));
  CHECK((r.col(2) - axis).norm() < 1e-12);
  const Mat3 other_gamma = zyz_rotation(theta, phi, 2.5);
  CHECK((other_gamma.col(2) - axis).norm() < 1e-12);

  CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-12);
  CHECK(r.determinant() == doctest::Approx(1.0));
}

TEST_CASE("vec_to_angles inverts the axis of zyz_rotation") {
  const std::vector<std::pair<double, double>> cases = {
      {0.3, 0.9}, {-2.8, 1.5}, {3.1, 0.01}, {-0.001, 1.57}};
  for (const auto& [theta, phi] : cases) {
    const Vec3 n(std::cos(theta) * std::sin(phi),
                 std::sin(theta) * std::sin(phi), std::cos(phi));
    const auto [t, p] = vec_to_angles(n);
    CHECK(t == doctest::Approx(theta).epsilon(1e-9));
    CHECK(p == doctest::Approx(phi).epsilon(1e-9));
  }
}

TEST_CASE("vec_to_angles canonicalizes the pole and folds theta") {
  const auto [t0, p0] = vec_to_angles(Vec3(0, 0, 1));
  CHECK(t0 == 0.0);
  CHECK(p0 == 0.0);

  // theta = atan2 lands in (-pi, pi]; -x axis direction gives theta = pi.
  const auto [t1, p1] = vec_to_angles(Vec3(-1, 0, 0));
  CHECK(t1 == doctest::Approx(kPi));
  CHECK(p1 == doctest::Approx(kPi / 2));
}

TEST_CASE("vec_to_angles rejects non-unit and below-horizontal vectors") {
  CHECK_THROWS_AS(vec_to_angles(Vec3(0, 0, 2)), std::invalid_argument);
  CHECK_THROWS_AS(vec_to_angles(Vec3(0, 0.6, -0.8)), std::invalid_argument);
}

TEST_CASE("gripper validation rejects unencodable layouts") {
  GripperSpec g;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // no cups

  g.cup_centers_local = {{-0.04, 0, 0}, {0.04, 0, 0}};
  CHECK_NOTHROW(g.validate());
  CHECK(g.cup_count() == 2);
  CHECK(g.max_cup_distance() == doctest::Approx(0.04));

  GripperSpec ten;
  for (int i = 0; i < 10; ++i)
    ten.cup_centers_local.push_back(Vec3(0.01 * (i + 1), 0, 0));
  CHECK_THROWS_AS(ten.validate(), std::invalid_argument);  // > 9 cups

  GripperSpec off_plane;
  off_plane.cup_centers_local = {{-0.04, 0, 0.01}, {0.04, 0, 0}};
  CHECK_THROWS_AS(off_plane.validate(), std::invalid_argument);

  GripperSpec collapsed;
  collapsed.cup_centers_local = {{0, 0, 0}, {0, 0, 0}};
  CHECK_THROWS_AS(collapsed.validate(), std::invalid_argument);

  GripperSpec single;  // one cup at the TCP is a legal degenerate layout
  single.cup_centers_local = {{0, 0, 0}};
  CHECK_NOTHROW(single.validate());
}

TEST_CASE("planner config validation bounds every field") {
  PlannerConfig c;
  CHECK_NOTHROW(c.validate());

  auto expect_throw = [](auto mutate) {
    PlannerConfig bad;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  };
  expect_throw([](PlannerConfig& c) { c.voxel_size = 0.0; });
  expect_throw([](PlannerConfig& c) { c.angle_interval = 0.0; });
  expect_throw([](PlannerConfig& c) { c.angle_interval = 2.0; });
  expect_throw([](PlannerConfig& c) { c.eps_normal = 0.0; });
  expect_throw([](PlannerConfig& c) { c.eps_dist = -1.0; });
  expect_throw([](PlannerConfig& c) { c.min_points_per_voxel = 0; });
  expect_throw([](PlannerConfig& c) { c.normal_k = 2; });
  expect_throw([](PlannerConfig& c) { c.top_fraction = 0.0; });
  expect_throw([](PlannerConfig& c) { c.top_fraction = 1.5; });
  expect_throw([](PlannerConfig& c) { c.min_cluster_size = 0; });
}

TEST_CASE("quantize_cell floors robustly at cell boundaries") {
  CHECK(quantize_cell(0.04, 0.005) == 8);
  CHECK(quantize_cell(-0.04, 0.005) == -8);
  CHECK(quantize_cell(0.0399999, 0.005) == 7);
  CHECK(quantize_cell(0.0, 0.005) == 0);
  // 0.005 * 3 is not exactly representable; the epsilon keeps products of
  // the cell size on their own boundary.
  CHECK(quantize_cell(0.005 * 3, 0.005) == 3);
  CHECK(quantize_cell(0.015, 0.005) == 3);
}

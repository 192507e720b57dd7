#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "helpers.hpp"
#include "multicup/orientation.hpp"
#include "multicup/types.hpp"

using namespace multicup;

TEST_CASE("5 degree lattice has 72 azimuths and 18 polar steps") {
  const AngleLattice lat(deg2rad(5.0));
  CHECK(lat.n_theta == 72);
  CHECK(lat.n_phi == 18);
  CHECK(lat.theta_of(0) == doctest::Approx(-kPi));
  CHECK(lat.theta_of(36) == doctest::Approx(0.0));
  CHECK(lat.phi_of(18) == doctest::Approx(kPi / 2));
  // gamma covers (-pi, pi]: first value one step above -pi, last value pi.
  CHECK(lat.gamma_of(0) == doctest::Approx(-kPi + deg2rad(5.0)));
  CHECK(lat.gamma_of(71) == doctest::Approx(kPi));
}

TEST_CASE("lattice keys quantize to the nearest node and fold the pole") {
  const AngleLattice lat(deg2rad(5.0));
  // 2.4 degrees rounds down, 2.6 rounds up.
  CHECK(lat.key_of(deg2rad(-180.0 + 2.4), deg2rad(30.0)) ==
        std::pair<int, int>(0, 6));
  CHECK(lat.key_of(deg2rad(-180.0 + 2.6), deg2rad(30.0)) ==
        std::pair<int, int>(1, 6));
  // theta wraps on the circle: 179 degrees rounds to the +pi node, which is
  // the same azimuth as -pi (ii = 0); 176 degrees stays at ii = 71.
  CHECK(lat.key_of(deg2rad(179.0), deg2rad(30.0)).first == 0);
  CHECK(lat.key_of(deg2rad(176.0), deg2rad(30.0)).first == 71);
  // At the pole every azimuth collapses to ii = 0.
  CHECK(lat.key_of(deg2rad(123.0), deg2rad(1.0)) == std::pair<int, int>(0, 0));
  CHECK(lat.key_of_normal(Vec3(0, 0, 1)) == std::pair<int, int>(0, 0));

  // key_of_normal agrees with vec_to_angles + key_of off the pole.
  const Vec3 n = Vec3(0.3, -0.5, 0.9).normalized();
  const auto [theta, phi] = vec_to_angles(n);
  CHECK(lat.key_of_normal(n) == lat.key_of(theta, phi));

  // direction() inverts key_of on exact lattice nodes.
  for (int jj = 1; jj <= lat.n_phi; ++jj)
    for (int ii = 0; ii < lat.n_theta; ii += 7) {
      const Vec3 d = lat.direction(ii, jj);
      CHECK(lat.key_of_normal(d) == std::pair<int, int>(ii, jj));
    }
}

TEST_CASE("orientation map: pole normal stores one azimuth per polar ring") {
  const NormalOrientationMap map =
      build_orientation_map(deg2rad(5.0), deg2rad(11.5));
  const auto& pole = map.orientations_for(0, 0);
  // 11.5 degrees of slack at a 5 degree interval admits jj' = 0, 1, 2; the
  // pole collapse keeps a single ii' = 0 representative for each.
  const std::vector<std::pair<int, int>> expected = {{0, 0}, {0, 1}, {0, 2}};
  CHECK(pole == expected);
}

TEST_CASE("orientation map entries match a brute-force lattice scan") {
  const double eps = deg2rad(11.5);
  const AngleLattice lat(deg2rad(5.0));
  const NormalOrientationMap map = build_orientation_map(deg2rad(5.0), eps);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int tested = 0;
  while (tested < 100) {
    Vec3 n(unit(rng), unit(rng), unit(rng));
    if (n.norm() < 1e-6 || n.z() < 0.05 * n.norm()) continue;
    n.normalize();
    ++tested;

    const auto key = lat.key_of_normal(n);
    const auto& got = map.orientations_for(key.first, key.second);

    // Brute force: every lattice direction within eps of the *quantized*
    // normal, with the same two collapses the map applies.
    const Vec3 qn = lat.direction(key.first, key.second);
    std::set<std::pair<int, int>> want;
    for (int jj = 0; jj <= lat.n_phi; ++jj) {
      for (int ii = 0; ii < lat.n_theta; ++ii) {
        if (angle_from_dot(qn.dot(lat.direction(ii, jj))) >= eps) continue;
        if (jj == 0) {
          want.insert({0, 0});
        } else if (key.second == 0) {
          want.insert({0, jj});
        } else {
          want.insert({ii, jj});
        }
      }
    }
    const std::set<std::pair<int, int>> got_set(got.begin(), got.end());
    CHECK(got_set == want);
    CHECK(got_set.size() == got.size());  // no duplicates stored
  }
}

TEST_CASE("flat plane yields 216 gripper orientations") {
  const NormalOrientationMap map =
      build_orientation_map(deg2rad(5.0), deg2rad(11.5));
  const AffordanceScene s =
      testing::flat_scene(25, 25, 200.0, 0.4, [](int, int) { return 1.f; });
  const OrientationSamples samples =
      sample_gripper_orientations(s, map, 0.10);

  // All votes land at the pole key; its map entry holds 3 orientation keys,
  // each swept through 72 gamma values.
  CHECK(samples.retained_keys ==
        std::vector<std::pair<int, int>>{{0, 0}});
  CHECK(samples.count() == 3 * 72);
  REQUIRE(samples.rotations.size() == samples.angles.size());
  REQUIRE(samples.rotations.size() == samples.orientation_keys.size());

  // Rotations are orthonormal and reproduce their stored angles.
  for (int i = 0; i < samples.count(); ++i) {
    const Mat3& r = samples.rotations[i];
    CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-12);
    const auto& a = samples.angles[i];
    CHECK((r - zyz_rotation(a[0], a[1], a[2])).norm() < 1e-12);
  }

  // Distinct rotations (gamma matters even when the axis repeats).
  std::set<std::array<double, 3>> unique_angles(samples.angles.begin(),
                                                samples.angles.end());
  CHECK(unique_angles.size() == samples.angles.size());
}

TEST_CASE("two tilted planes retain both normal keys") {
  // Split scene: left half tilts the normal +10 degrees about x, right half
  // -10 degrees. Both keys clear any top-fraction threshold (equal votes).
  AffordanceScene s =
      testing::flat_scene(20, 20, 200.0, 0.4, [](int, int) { return 1.f; });
  const double tilt = deg2rad(10.0);
  const Vec3 n_left(0, std::sin(tilt), std::cos(tilt));
  const Vec3 n_right(0, -std::sin(tilt), std::cos(tilt));
  for (int v = 0; v < 20; ++v)
    for (int u = 0; u < 20; ++u)
      s.normals[s.index(v, u)] = (u < 10) ? n_left : n_right;

  const NormalOrientationMap map =
      build_orientation_map(deg2rad(5.0), deg2rad(11.5));
  const OrientationSamples samples = sample_gripper_orientations(s, map, 0.10);

  REQUIRE(samples.retained_keys.size() == 2);
  CHECK(samples.retained_counts == std::vector<int>{200, 200});
  const AngleLattice lat(deg2rad(5.0));
  const std::set<std::pair<int, int>> keys(samples.retained_keys.begin(),
                                           samples.retained_keys.end());
  CHECK(keys.count(lat.key_of_normal(n_left)) == 1);
  CHECK(keys.count(lat.key_of_normal(n_right)) == 1);
  // +/-10 degrees about x lands at phi = 10 degrees (jj = 2) with azimuths
  // +/-90 degrees.
  CHECK(lat.key_of_normal(n_left) == std::pair<int, int>(54, 2));
  CHECK(lat.key_of_normal(n_right) == std::pair<int, int>(18, 2));
}

TEST_CASE("top fraction keeps the upper count quantile with ties") {
  // Distribution with 10 distinct counts 10,20,...,100 over distinct keys:
  // top_fraction = 0.10 keeps only the count-100 key.
  const NormalOrientationMap map =
      build_orientation_map(deg2rad(5.0), deg2rad(11.5));
  const AngleLattice lat(deg2rad(5.0));

  // Build a synthetic scene whose normals hit chosen lattice nodes an exact
  // number of times. Keys at jj = 6 (30 degrees polar), azimuths spread out.
  const int total = 10 + 20 + 30 + 40 + 50 + 60 + 70 + 80 + 90 + 100;
  AffordanceScene s = testing::flat_scene(total, 1, 200.0, 0.4,
                                          [](int, int) { return 1.f; });
  int cursor = 0;
  for (int b = 0; b < 10; ++b) {
    const Vec3 n = lat.direction(7 * b, 6);
    for (int c = 0; c < 10 * (b + 1); ++c)
      s.normals[s.index(0, cursor++)] = n;
  }
  REQUIRE(cursor == total);

  const OrientationSamples top10 = sample_gripper_orientations(s, map, 0.10);
  REQUIRE(top10.retained_keys.size() == 1);
  CHECK(top10.retained_keys[0] == std::pair<int, int>(63, 6));
  CHECK(top10.retained_counts == std::vector<int>{100});

  // 0.25 keeps the top quarter of the count distribution: counts 90, 100.
  const OrientationSamples top25 = sample_gripper_orientations(s, map, 0.25);
  CHECK(top25.retained_keys.size() == 2);

  // Equal counts everywhere: everything ties at the threshold and survives.
  AffordanceScene eq = testing::flat_scene(40, 1, 200.0, 0.4,
                                           [](int, int) { return 1.f; });
  for (int u = 0; u < 40; ++u)
    eq.normals[eq.index(0, u)] = lat.direction((u % 4) * 18, 6);
  const OrientationSamples all = sample_gripper_orientations(eq, map, 0.10);
  CHECK(all.retained_keys.size() == 4);
}

TEST_CASE("orientation map json cache round-trips") {
  const std::string dir = testing::temp_dir("omap");
  const std::string path = dir + "/map.json";
  const NormalOrientationMap built =
      build_orientation_map(deg2rad(10.0), deg2rad(12.0));
  built.save(path);

  NormalOrientationMap loaded;
  REQUIRE(loaded.load(path, deg2rad(10.0), deg2rad(12.0)));
  const AngleLattice& lat = loaded.lattice();
  CHECK(lat.n_theta == 36);
  for (int jj = 0; jj <= lat.n_phi; ++jj)
    for (int ii = 0; ii < lat.n_theta; ++ii) {
      if (jj == 0 && ii != 0) continue;
      CHECK(loaded.orientations_for(ii, jj) == built.orientations_for(ii, jj));
    }

  // Parameter mismatch and missing file both report a miss.
  NormalOrientationMap other;
  CHECK(!other.load(path, deg2rad(5.0), deg2rad(12.0)));
  CHECK(!other.load(path, deg2rad(10.0), deg2rad(11.0)));
  CHECK(!other.load(dir + "/nope.json", deg2rad(10.0), deg2rad(12.0)));
}

TEST_CASE("sampling is deterministic") {
  const NormalOrientationMap map =
      build_orientation_map(deg2rad(5.0), deg2rad(11.5));
  const AffordanceScene s = testing::flat_scene(
      15, 15, 200.0, 0.4,
      [](int v, int u) { return ((u + v) % 2) ? 1.f : 0.f; });
  const OrientationSamples a = sample_gripper_orientations(s, map, 0.10);
  const OrientationSamples b = sample_gripper_orientations(s, map, 0.10);
  REQUIRE(a.count() == b.count());
  CHECK(a.orientation_keys == b.orientation_keys);
  CHECK(a.angles == b.angles);
  for (int i = 0; i < a.count(); ++i)
    CHECK((a.rotations[i] - b.rotations[i]).norm() == 0.0);
}

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multicup/common.hpp"

namespace multicup {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Cup layout of a vacuum gripper in gripper-local coordinates. The tool
/// center point (TCP) is the local origin and all cups lie in the local
/// x-y plane.
struct GripperSpec {
  std::vector<Vec3> cup_centers_local;
  double cup_radius = 0.0;  // metadata only, not used by the planner

  int cup_count() const { return static_cast<int>(cup_centers_local.size()); }

  /// Largest cup-to-TCP distance; sets the kernel extent.
  double max_cup_distance() const {
    double d = 0.0;
    for (const auto& c : cup_centers_local) d = std::max(d, c.norm());
    return d;
  }

  /// Throws std::invalid_argument on a layout the planner cannot encode:
  /// no cups, more than 9 cups (one decimal digit per cup), cups out of
  /// the gripper plane, or a multi-cup layout collapsed onto the TCP.
  void validate() const;
};

/// Planner parameters. Angles are radians everywhere inside the library;
/// degrees exist only at the CLI/JSON boundary.
struct PlannerConfig {
  double voxel_size = 0.005;              // l
  double angle_interval = deg2rad(5.0);   // delta alpha
  double eps_normal = deg2rad(11.5);      // epsilon_1
  double eps_dist = 0.01;                 // epsilon_2
  int min_points_per_voxel = 11;
  int normal_k = 16;
  double top_fraction = 0.10;
  int min_cluster_size = 5;               // pixels; smaller blobs are background
  // Score composition weights (see ranking).
  double w_dist = 1.0;
  double w_var = 1.0;
  double w_orient = 1.0;

  void validate() const;
};

enum class GraspSource : uint8_t { kMultiCup, kSingleCupFallback };

inline const char* to_string(GraspSource s) {
  return s == GraspSource::kMultiCup ? "multi_cup" : "single_cup_fallback";
}

/// One gripper pose with its cup activation mask.
struct GraspCandidate {
  Vec3 position = Vec3::Zero();      // TCP, world frame
  Mat3 orientation = Mat3::Identity();
  std::vector<Vec3> cup_centers_world;
  std::vector<uint8_t> activation;   // 1 = apply vacuum on that cup
  GraspSource source = GraspSource::kMultiCup;

  // Provenance within the pipeline; used for oracle set-comparison and
  // deterministic ordering. -1 cell for fallback candidates.
  int orientation_index = -1;
  std::array<int, 3> cell = {-1, -1, -1};

  Vec3 axis() const { return orientation.col(2); }
  int active_count() const {
    int n = 0;
    for (uint8_t a : activation) n += a;
    return n;
  }
};

/// Score terms for one candidate (see ranking for the composition rule).
struct ScoreBreakdown {
  int max_obj = 0;
  double j_dist = 0.0;    // meters, mean cup-to-cluster-center distance
  double j_var = 0.0;     // meters^2, variance of that distance across clusters
  double j_orient = 0.0;  // [0, 1], cup-polygon / cluster-axis alignment
  double j = 0.0;         // dimensionless composite, higher is better
};

struct RankedEntry {
  std::vector<int> contact_labels;  // sorted unique cluster labels under cups
  ScoreBreakdown score;
  GraspCandidate candidate;
};

/// Full ranking, best first. `optimal` duplicates the first entry so a
/// caller holding only the plan keeps the selected grasp.
struct RankedPlan {
  GraspCandidate optimal;
  std::vector<RankedEntry> ranking;
};

/// ZYZ Euler rotation: Rz(theta) * Ry(phi) * Rz(gamma). The third column
/// is the gripper z axis [cos(theta)sin(phi), sin(theta)sin(phi), cos(phi)]
/// and does not depend on gamma.
inline Mat3 zyz_rotation(double theta, double phi, double gamma) {
  return (Eigen::AngleAxisd(theta, Vec3::UnitZ()) *
          Eigen::AngleAxisd(phi, Vec3::UnitY()) *
          Eigen::AngleAxisd(gamma, Vec3::UnitZ()))
      .toRotationMatrix();
}

/// Azimuth/polar decomposition of an up-facing unit vector:
/// v = [cos(theta)sin(phi), sin(theta)sin(phi), cos(phi)].
/// theta in (-pi, pi], phi in [0, pi/2]; theta is canonically 0 at the pole.
/// Throws std::invalid_argument for non-unit or down-facing input.
std::pair<double, double> vec_to_angles(const Vec3& v);

}  // namespace multicup

#include "multicup/types.hpp"

#include <cmath>
#include <stdexcept>

namespace multicup {

void GripperSpec::validate() const {
  if (cup_centers_local.empty())
    throw std::invalid_argument("gripper has no cups");
  if (cup_count() > 9)
    throw std::invalid_argument(
        "gripper has more than 9 cups; the encoding assigns one decimal "
        "digit per cup");
  for (const auto& c : cup_centers_local) {
    if (!c.allFinite())
      throw std::invalid_argument("non-finite cup center");
    if (std::abs(c.z()) > 1e-9)
      throw std::invalid_argument("cup centers must lie in the gripper plane");
  }
  if (cup_count() >= 2 && max_cup_distance() <= 0.0)
    throw std::invalid_argument(
        "multi-cup gripper collapsed onto the TCP (max cup distance is 0)");
  if (cup_radius < 0.0) throw std::invalid_argument("negative cup radius");
}

void PlannerConfig::validate() const {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("voxel_size must be > 0");
  if (!(angle_interval > 0.0) || angle_interval > kPi / 2)
    throw std::invalid_argument("angle_interval must be in (0, pi/2]");
  if (!(eps_normal > 0.0) || eps_normal >= kPi / 2)
    throw std::invalid_argument("eps_normal must be in (0, pi/2)");
  if (!(eps_dist > 0.0)) throw std::invalid_argument("eps_dist must be > 0");
  if (min_points_per_voxel < 1)
    throw std::invalid_argument("min_points_per_voxel must be >= 1");
  if (normal_k < 3) throw std::invalid_argument("normal_k must be >= 3");
  if (!(top_fraction > 0.0) || top_fraction > 1.0)
    throw std::invalid_argument("top_fraction must be in (0, 1]");
  if (min_cluster_size < 1)
    throw std::invalid_argument("min_cluster_size must be >= 1");
  if (w_dist < 0.0 || w_var < 0.0 || w_orient < 0.0)
    throw std::invalid_argument("score weights must be non-negative");
}

std::pair<double, double> vec_to_angles(const Vec3& v) {
  if (!v.allFinite()) throw std::invalid_argument("non-finite vector");
  if (std::abs(v.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("vector is not unit length");
  if (v.z() < -1e-9)
    throw std::invalid_argument("vector points below the horizontal plane");

  const double phi = std::acos(clamp_unit(v.z()));
  double theta = std::atan2(v.y(), v.x());
  // atan2 returns -pi for directions on the negative x axis approached from
  // below; fold onto (-pi, pi].
  if (theta <= -kPi) theta = kPi;
  // Azimuth is undefined at the pole; use 0 canonically.
  if (std::abs(v.x()) < 1e-12 && std::abs(v.y()) < 1e-12) theta = 0.0;
  return {theta, phi};
}

}  // namespace multicup

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "multicup/scene.hpp"

namespace multicup {

/// Discrete lattice over the (theta, phi) hemisphere plus the gamma sweep.
/// Shared by the offline map and the online sampler so both quantize
/// identically. theta and gamma live on the (-pi, pi] circle at interval
/// delta alpha; phi spans [0, pi/2] inclusive.
struct AngleLattice {
  double angle_interval = 0.0;  // delta alpha
  int n_theta = 0;              // round(2*pi / delta), distinct azimuths
  int n_phi = 0;                // round((pi/2) / delta); jj runs 0..n_phi

  explicit AngleLattice(double angle_interval_rad);

  /// Lattice key of a normal's (theta, phi); the pole row (jj == 0)
  /// canonically carries ii == 0.
  std::pair<int, int> key_of(double theta, double phi) const;
  std::pair<int, int> key_of_normal(const Vec3& n) const;
  double theta_of(int ii) const { return -kPi + ii * angle_interval; }
  double phi_of(int jj) const { return jj * angle_interval; }
  /// kk in [0, n_theta) covers (-pi, pi] from -pi+delta up to pi.
  double gamma_of(int kk) const { return -kPi + (kk + 1) * angle_interval; }
  /// Unit direction of lattice key (ii, jj).
  Vec3 direction(int ii, int jj) const;
};

/// Offline map from a quantized surface normal to the gripper-axis lattice
/// keys (ii', jj') within eps_normal of it. Exhaustive, with two
/// collapses: gripper-axis pole duplicates (jj' == 0, any ii') store once
/// as (0, 0), and the pole normal key — where every azimuth at a feasible
/// jj' matches by symmetry — stores one ii' == 0 representative per jj'.
class NormalOrientationMap {
 public:
  NormalOrientationMap() = default;

  const AngleLattice& lattice() const { return lattice_; }
  double eps_normal() const { return eps_normal_; }

  const std::vector<std::pair<int, int>>& orientations_for(int ii,
                                                           int jj) const;

  /// JSON cache round-trip ("ii,jj" -> [[ii', jj'], ...] plus parameters).
  /// load returns false on missing file or parameter mismatch.
  void save(const std::string& path) const;
  bool load(const std::string& path, double angle_interval_rad,
            double eps_normal_rad);

  friend NormalOrientationMap build_orientation_map(double, double);

 private:
  AngleLattice lattice_{deg2rad(5.0)};
  double eps_normal_ = 0.0;
  // entries_[jj * n_theta + ii]; pole row populated at ii == 0 only.
  std::vector<std::vector<std::pair<int, int>>> entries_;
};

/// Builds the map by scanning the full lattice. Requires
/// 0 < angle_interval <= pi/4.
NormalOrientationMap build_orientation_map(double angle_interval_rad,
                                           double eps_normal_rad);

/// Gripper orientations selected for one scene.
struct OrientationSamples {
  std::vector<Mat3> rotations;
  std::vector<std::array<double, 3>> angles;          // (theta, phi, gamma)
  std::vector<std::pair<int, int>> orientation_keys;  // (ii', jj') per rotation
  std::vector<std::pair<int, int>> retained_keys;     // normal keys kept
  std::vector<int> retained_counts;                   // votes per kept key

  int count() const { return static_cast<int>(rotations.size()); }
};

/// Histograms the normals of affordance-positive pixels over the lattice,
/// keeps the keys whose vote count reaches the (1 - top_fraction) count
/// quantile (ties retained; never fewer than one key), maps them through
/// the offline map, deduplicates the orientation keys, and expands each by
/// the full gamma sweep. No affordance-positive normals -> empty samples.
OrientationSamples sample_gripper_orientations(const AffordanceScene& scene,
                                               const NormalOrientationMap& map,
                                               double top_fraction);

}  // namespace multicup

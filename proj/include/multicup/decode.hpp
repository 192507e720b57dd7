#pragma once

#include <unordered_map>
#include <vector>

#include "multicup/conv.hpp"
#include "multicup/orientation.hpp"

namespace multicup {

/// View of the per-cup activation digits of a ConvResult. The 5-D
/// activation array is never materialized; digits are extracted on read.
struct ActivationView {
  const ConvResult* conv = nullptr;
  int cup_count = 0;

  /// A[n,m,t,p,i] = (value / 10^(cup_count-1-i)) % 10, clamped to {0,1}.
  int at(int n, int m, int t, int p, int i) const {
    std::int64_t scale = 1;
    for (int s = 0; s < cup_count - 1 - i; ++s) scale *= 10;
    const std::int64_t digit = (conv->at(n, m, t, p) / scale) % 10;
    return digit > 1 ? 1 : static_cast<int>(digit);
  }
};

/// Spatial hash over the affordance-masked scene points, for nearest-point
/// queries during the normal-direction check. Bucket side equals the cell
/// size, so a +-2 bucket window covers any search radius <= 2*cell.
class MaskedPointIndex {
 public:
  MaskedPointIndex(const AffordanceScene& scene, double cell);

  /// Index of the masked scene point nearest to q within max_dist
  /// (requires max_dist <= 2*cell), or -1.
  int nearest(const Vec3& q, double max_dist) const;

 private:
  const AffordanceScene* scene_;
  double cell_;
  std::unordered_map<std::int64_t, std::vector<int>> buckets_;
};

/// Decodes conv responses into grasp candidates: per orientation and cell,
/// split the value into per-cup decimal digits (clamped to {0,1}), keep
/// cells activating at least two cups, place the TCP at the cell center,
/// and compose world cup centers. Ordered by (orientation, cell i, j, k)
/// ascending. Volume n of `conv` corresponds to orientation
/// first_orientation + n, letting the planner convolve in batches.
std::vector<GraspCandidate> decode(const ConvResult& conv,
                                   const VoxelGrid& grid,
                                   const OrientationSamples& samples,
                                   const GripperSpec& gripper,
                                   int first_orientation = 0);

/// Keeps candidates whose every active cup has an affordance-masked
/// surface point within sqrt(3)*voxel_size whose normal deviates from the
/// gripper axis by less than eps_normal. A cup hovering over a hole (no
/// masked point inside the guard radius) rejects the candidate.
std::vector<GraspCandidate> normal_direction_check(
    std::vector<GraspCandidate> candidates, const AffordanceScene& scene,
    double voxel_size, double eps_normal);

}  // namespace multicup

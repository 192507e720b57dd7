#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "multicup/scene.hpp"

namespace multicup {

/// Binary occupancy grid over the affordance-masked points of a scene.
/// Grid axes are world axes; cell (i,j,k) spans
/// [B_min + (i,j,k)*l, B_min + (i+1,j+1,k+1)*l).
struct VoxelGrid {
  Vec3 b_min = Vec3::Zero();
  Vec3 b_max = Vec3::Zero();
  double voxel_size = 0.0;
  std::array<int, 3> dims = {0, 0, 0};
  std::vector<uint8_t> occupancy;             // dims[0]*dims[1]*dims[2]
  std::vector<std::int32_t> cell_slot;        // per cell: -1 or cell_points row
  std::vector<std::vector<int>> cell_points;  // pixel indices, occupied cells

  std::int64_t num_cells() const {
    return std::int64_t(dims[0]) * dims[1] * dims[2];
  }
  std::int64_t linear(int i, int j, int k) const {
    return (std::int64_t(i) * dims[1] + j) * dims[2] + k;
  }
  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && i < dims[0] && j >= 0 && j < dims[1] && k >= 0 &&
           k < dims[2];
  }
  bool occupied(int i, int j, int k) const {
    return in_bounds(i, j, k) && occupancy[linear(i, j, k)] != 0;
  }
  /// Cell containing a world point (points on the upper boundary clamp into
  /// the last cell). No bounds check beyond the clamp.
  std::array<int, 3> cell_of(const Vec3& p) const;
  /// Pixel indices inside an occupied cell, nullptr otherwise.
  const std::vector<int>* points_in(int i, int j, int k) const {
    if (!in_bounds(i, j, k)) return nullptr;
    const std::int32_t s = cell_slot[linear(i, j, k)];
    return s < 0 ? nullptr : &cell_points[s];
  }
  Vec3 cell_center(int i, int j, int k) const {
    return b_min + Vec3(i + 0.5, j + 0.5, k + 0.5) * voxel_size;
  }
  int occupied_count() const {
    int n = 0;
    for (uint8_t o : occupancy) n += o;
    return n;
  }
};

/// Voxelizes the affordance-masked subset of the scene (pixels with
/// affordance > threshold and a valid point). A cell is occupied when it
/// holds at least min_points_per_voxel masked points. Throws
/// EmptySceneError when no pixel passes the mask.
VoxelGrid voxelize(const AffordanceScene& scene, double voxel_size,
                   int min_points_per_voxel, float affordance_threshold = 0.f);

}  // namespace multicup

#include "multicup/voxel.hpp"

#include <algorithm>

namespace multicup {

std::array<int, 3> VoxelGrid::cell_of(const Vec3& p) const {
  std::array<int, 3> c;
  for (int a = 0; a < 3; ++a) {
    int i = quantize_cell(p[a] - b_min[a], voxel_size);
    c[a] = std::clamp(i, 0, dims[a] - 1);
  }
  return c;
}

VoxelGrid voxelize(const AffordanceScene& scene, double voxel_size,
                   int min_points_per_voxel, float affordance_threshold) {
  std::vector<int> masked;
  masked.reserve(scene.size());
  for (int i = 0; i < scene.size(); ++i) {
    if (scene.affordance[i] > affordance_threshold && scene.valid_at(i))
      masked.push_back(i);
  }
  if (masked.empty())
    throw EmptySceneError("no affordance-positive points to voxelize");

  VoxelGrid grid;
  grid.voxel_size = voxel_size;
  grid.b_min = scene.points[masked[0]];
  grid.b_max = grid.b_min;
  for (int i : masked) {
    grid.b_min = grid.b_min.cwiseMin(scene.points[i]);
    grid.b_max = grid.b_max.cwiseMax(scene.points[i]);
  }
  for (int a = 0; a < 3; ++a) {
    const double extent = grid.b_max[a] - grid.b_min[a];
    grid.dims[a] = std::max(1, static_cast<int>(extent / voxel_size));
  }

  std::vector<int> counts(static_cast<size_t>(grid.num_cells()), 0);
  std::vector<std::int64_t> point_cell(masked.size());
  for (size_t mi = 0; mi < masked.size(); ++mi) {
    const auto c = grid.cell_of(scene.points[masked[mi]]);
    const std::int64_t lin = grid.linear(c[0], c[1], c[2]);
    point_cell[mi] = lin;
    ++counts[lin];
  }

  grid.occupancy.assign(counts.size(), 0);
  grid.cell_slot.assign(counts.size(), -1);
  for (size_t lin = 0; lin < counts.size(); ++lin) {
    if (counts[lin] >= min_points_per_voxel) {
      grid.occupancy[lin] = 1;
      grid.cell_slot[lin] = static_cast<std::int32_t>(grid.cell_points.size());
      grid.cell_points.emplace_back();
      grid.cell_points.back().reserve(counts[lin]);
    }
  }
  for (size_t mi = 0; mi < masked.size(); ++mi) {
    const std::int32_t s = grid.cell_slot[point_cell[mi]];
    if (s >= 0) grid.cell_points[s].push_back(masked[mi]);
  }
  return grid;
}

}  // namespace multicup

#pragma once

#include <cstdint>
#include <vector>

#include "multicup/kernels.hpp"
#include "multicup/voxel.hpp"

namespace multicup {

/// Cross-correlation responses: one int64 volume per kernel, same dims as
/// the occupancy grid (zero-padded borders).
struct ConvResult {
  std::array<int, 3> dims = {0, 0, 0};
  std::vector<std::vector<std::int64_t>> volumes;  // [kernel][cell]

  std::int64_t linear(int i, int j, int k) const {
    return (std::int64_t(i) * dims[1] + j) * dims[2] + k;
  }
  std::int64_t at(int n, int i, int j, int k) const {
    return volumes[n][linear(i, j, k)];
  }
};

/// Reference dense path: for every output cell, sum occupancy * kernel over
/// the kernel window.
ConvResult conv3d_dense(const VoxelGrid& grid, const EncodedKernelSet& kernels,
                        int threads = 1);

/// Sparse path: scatter each occupied cell through the kernel nonzeros.
/// Bit-identical to conv3d_dense.
ConvResult conv3d_sparse(const VoxelGrid& grid,
                         const EncodedKernelSet& kernels, int threads = 1);

}  // namespace multicup

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "multicup/types.hpp"

namespace multicup {

/// One integer-encoded kernel per sampled orientation. Cup i contributes
/// the digit 10^(cup_count-1-i) at the cell its rotated center falls in;
/// when two cups land in the same cell the larger digit wins and the
/// collision is flagged. Kernels are cubic with odd side K_e and stored
/// sparse (at most cup_count nonzeros each).
struct EncodedKernelSet {
  int size = 0;    // K_e
  int center = 0;  // (K_e - 1) / 2
  int cup_count = 0;
  bool has_collisions = false;
  std::vector<uint8_t> collision_flags;  // per kernel

  struct Entry {
    std::array<int, 3> idx;  // kernel-grid indices, 0..K_e-1
    std::int64_t value;      // cup digit (the largest one on a collision)
  };
  std::vector<std::vector<Entry>> kernels;  // one list per orientation

  int count() const { return static_cast<int>(kernels.size()); }
  /// Dense K_e^3 view of kernel n (row-major i,j,k), for the dense conv
  /// path and for tests.
  std::vector<std::int64_t> dense(int n) const;
};

/// Builds the kernel set for a gripper over the given rotations.
/// Cell side is voxel_size; indices quantize as floor(x / l) + center with
/// the shared epsilon-robust floor.
EncodedKernelSet build_encoded_kernels(const GripperSpec& gripper,
                                       const std::vector<Mat3>& rotations,
                                       double voxel_size);

}  // namespace multicup

#include "multicup/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace multicup {

std::vector<std::int64_t> EncodedKernelSet::dense(int n) const {
  std::vector<std::int64_t> out(size_t(size) * size * size, 0);
  for (const Entry& e : kernels.at(n)) {
    out[(size_t(e.idx[0]) * size + e.idx[1]) * size + e.idx[2]] = e.value;
  }
  return out;
}

EncodedKernelSet build_encoded_kernels(const GripperSpec& gripper,
                                       const std::vector<Mat3>& rotations,
                                       double voxel_size) {
  gripper.validate();
  if (!(voxel_size > 0.0))
    throw std::invalid_argument("voxel_size must be > 0");

  EncodedKernelSet set;
  set.cup_count = gripper.cup_count();
  const int half =
      static_cast<int>(std::ceil(gripper.max_cup_distance() / voxel_size));
  set.size = 2 * half + 1;
  set.center = half;

  std::vector<std::int64_t> digit(set.cup_count);
  digit[set.cup_count - 1] = 1;
  for (int i = set.cup_count - 2; i >= 0; --i) digit[i] = digit[i + 1] * 10;

  set.kernels.reserve(rotations.size());
  for (const Mat3& rot : rotations) {
    std::vector<EncodedKernelSet::Entry> entries;
    bool collided = false;
    for (int i = 0; i < set.cup_count; ++i) {
      const Vec3 c = rot * gripper.cup_centers_local[i];
      std::array<int, 3> idx;
      for (int a = 0; a < 3; ++a) {
        const int q = quantize_cell(c[a], voxel_size) + set.center;
        if (q < 0 || q >= set.size)
          throw std::logic_error("rotated cup center escaped the kernel");
        idx[a] = q;
      }
      auto same = std::find_if(entries.begin(), entries.end(),
                               [&](const auto& e) { return e.idx == idx; });
      if (same != entries.end()) {
        // Cup spacing below the cell size: keep the larger digit (the
        // earlier cup, since digits decrease with the index).
        collided = true;
        same->value = std::max(same->value, digit[i]);
      } else {
        entries.push_back({idx, digit[i]});
      }
    }
    set.has_collisions = set.has_collisions || collided;
    set.collision_flags.push_back(collided);
    set.kernels.push_back(std::move(entries));
  }
  return set;
}

}  // namespace multicup

#include "multicup/decode.hpp"

#include <algorithm>
#include <cmath>

namespace multicup {
namespace {

std::int64_t bucket_key(int i, int j, int k) {
  // Pack signed bucket coordinates; 21 bits per axis is ample for scenes
  // measured in meters at millimeter cells.
  const std::int64_t b = 1 << 20;
  return ((std::int64_t(i) + b) << 42) | ((std::int64_t(j) + b) << 21) |
         (std::int64_t(k) + b);
}

}  // namespace

MaskedPointIndex::MaskedPointIndex(const AffordanceScene& scene, double cell)
    : scene_(&scene), cell_(cell) {
  for (int i = 0; i < scene.size(); ++i) {
    if (!(scene.affordance[i] > 0.f) || !scene.valid_at(i)) continue;
    const Vec3& p = scene.points[i];
    buckets_[bucket_key(quantize_cell(p.x(), cell_),
                        quantize_cell(p.y(), cell_),
                        quantize_cell(p.z(), cell_))]
        .push_back(i);
  }
}

int MaskedPointIndex::nearest(const Vec3& q, double max_dist) const {
  const int bi = quantize_cell(q.x(), cell_);
  const int bj = quantize_cell(q.y(), cell_);
  const int bk = quantize_cell(q.z(), cell_);
  int best = -1;
  double best_d2 = max_dist * max_dist;
  for (int di = -2; di <= 2; ++di) {
    for (int dj = -2; dj <= 2; ++dj) {
      for (int dk = -2; dk <= 2; ++dk) {
        auto it = buckets_.find(bucket_key(bi + di, bj + dj, bk + dk));
        if (it == buckets_.end()) continue;
        for (int idx : it->second) {
          const double d2 = (scene_->points[idx] - q).squaredNorm();
          if (d2 < best_d2 || (d2 == best_d2 && best >= 0 && idx < best) ||
              (d2 == best_d2 && best < 0)) {
            best_d2 = d2;
            best = idx;
          }
        }
      }
    }
  }
  return best;
}

std::vector<GraspCandidate> decode(const ConvResult& conv,
                                   const VoxelGrid& grid,
                                   const OrientationSamples& samples,
                                   const GripperSpec& gripper,
                                   int first_orientation) {
  const int nc = gripper.cup_count();
  std::vector<std::int64_t> digit(nc);
  digit[nc - 1] = 1;
  for (int i = nc - 2; i >= 0; --i) digit[i] = digit[i + 1] * 10;

  std::vector<GraspCandidate> out;
  for (int n = 0; n < static_cast<int>(conv.volumes.size()); ++n) {
    const auto& vol = conv.volumes[n];
    const Mat3& rot = samples.rotations[first_orientation + n];
    for (int m = 0; m < conv.dims[0]; ++m) {
      for (int t = 0; t < conv.dims[1]; ++t) {
        for (int p = 0; p < conv.dims[2]; ++p) {
          const std::int64_t v = vol[conv.linear(m, t, p)];
          if (v == 0) continue;
          GraspCandidate cand;
          cand.activation.resize(nc);
          int active = 0;
          for (int i = 0; i < nc; ++i) {
            const std::int64_t d = (v / digit[i]) % 10;
            cand.activation[i] = d >= 1 ? 1 : 0;
            active += cand.activation[i];
          }
          if (active < 2) continue;
          cand.position = grid.cell_center(m, t, p);
          cand.orientation = rot;
          cand.cup_centers_world.reserve(nc);
          for (int i = 0; i < nc; ++i)
            cand.cup_centers_world.push_back(
                rot * gripper.cup_centers_local[i] + cand.position);
          cand.source = GraspSource::kMultiCup;
          cand.orientation_index = first_orientation + n;
          cand.cell = {m, t, p};
          out.push_back(std::move(cand));
        }
      }
    }
  }
  return out;
}

std::vector<GraspCandidate> normal_direction_check(
    std::vector<GraspCandidate> candidates, const AffordanceScene& scene,
    double voxel_size, double eps_normal) {
  const MaskedPointIndex index(scene, voxel_size);
  const double guard = voxel_size * std::sqrt(3.0);
  std::vector<GraspCandidate> kept;
  kept.reserve(candidates.size());
  for (auto& cand : candidates) {
    const Vec3 ng = cand.axis();
    bool ok = true;
    for (size_t i = 0; i < cand.activation.size() && ok; ++i) {
      if (!cand.activation[i]) continue;
      const int nearest = index.nearest(cand.cup_centers_world[i], guard);
      if (nearest < 0) {
        ok = false;  // cup hovers over a hole
        break;
      }
      const Vec3& n = scene.normals[nearest];
      ok = n.allFinite() && angle_from_dot(n.dot(ng)) < eps_normal;
    }
    if (ok) kept.push_back(std::move(cand));
  }
  return kept;
}

}  // namespace multicup

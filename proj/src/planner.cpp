#include "multicup/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "multicup/kernels.hpp"
#include "multicup/parallel.hpp"

namespace multicup {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Affordance argmax pixel: highest value, ties broken nearest the image
/// center, then scan order. Requires a valid point and a finite normal
/// (the fallback grasp aligns to it). Returns -1 when nothing qualifies.
int argmax_pixel(const AffordanceScene& scene) {
  const double cu = (scene.width - 1) / 2.0;
  const double cv = (scene.height - 1) / 2.0;
  int best = -1;
  float best_aff = 0.f;
  double best_d2 = 0.0;
  for (int v = 0; v < scene.height; ++v) {
    for (int u = 0; u < scene.width; ++u) {
      const int idx = scene.index(v, u);
      const float aff = scene.affordance[idx];
      if (!(aff > 0.f) || !scene.valid_at(idx) ||
          !scene.normals[idx].allFinite())
        continue;
      const double du = u - cu, dv = v - cv;
      const double d2 = du * du + dv * dv;
      if (aff > best_aff || (aff == best_aff && best >= 0 && d2 < best_d2) ||
          best < 0) {
        best = idx;
        best_aff = aff;
        best_d2 = d2;
      }
    }
  }
  return best;
}

GraspCandidate fallback_candidate(const AffordanceScene& scene, int pixel,
                                  const PlanRequest& request) {
  const Vec3 goal = scene.points[pixel];
  const auto [theta, phi] = vec_to_angles(scene.normals[pixel]);
  const Mat3 rot = zyz_rotation(theta, phi, 0.0);

  const auto& cups = request.gripper.cup_centers_local;
  int cup = 0;
  if (request.current_tcp) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(cups.size()); ++i) {
      const double d = (goal - rot * cups[i] - *request.current_tcp).norm();
      if (d < best) {
        best = d;
        cup = i;
      }
    }
  }

  GraspCandidate cand;
  cand.orientation = rot;
  cand.position = goal - rot * cups[cup];
  cand.activation.assign(cups.size(), 0);
  cand.activation[cup] = 1;
  for (const Vec3& c : cups) cand.cup_centers_world.push_back(rot * c + cand.position);
  cand.source = GraspSource::kSingleCupFallback;
  return cand;
}

}  // namespace

PlanOutcome plan(const AffordanceScene& scene, const PlanRequest& request,
                 const NormalOrientationMap* map) {
  request.config.validate();
  request.gripper.validate();
  const PlannerConfig& cfg = request.config;
  const int threads = resolve_threads(request.threads);

  PlanOutcome out;
  const auto t_start = Clock::now();

  // Voxelize the affordance-masked points.
  auto t = Clock::now();
  VoxelGrid grid;
  bool empty_scene = false;
  try {
    grid = voxelize(scene, cfg.voxel_size, cfg.min_points_per_voxel);
  } catch (const EmptySceneError&) {
    empty_scene = true;
  }
  out.t_voxelize_ms = ms_since(t);
  if (empty_scene) {
    out.status = PlanStatus::kNoSolution;
    out.t_total_ms = ms_since(t_start);
    return out;
  }
  out.occupied_cells = grid.occupied_count();

  // Gripper orientations for the scene's dominant normals.
  t = Clock::now();
  NormalOrientationMap local_map;
  if (!map) {
    local_map = build_orientation_map(cfg.angle_interval, cfg.eps_normal);
    map = &local_map;
  }
  const OrientationSamples samples =
      sample_gripper_orientations(scene, *map, cfg.top_fraction);
  out.orientation_count = samples.count();
  out.t_orientations_ms = ms_since(t);

  // A kernel wider than the conv engine accepts means the gripper cannot
  // span the occupied region multi-cup; skip straight to the fallback.
  const int max_dim = std::max({grid.dims[0], grid.dims[1], grid.dims[2]});
  const int kernel_extent =
      2 * static_cast<int>(
              std::ceil(request.gripper.max_cup_distance() / cfg.voxel_size)) +
      1;

  std::vector<GraspCandidate> candidates;
  if (out.occupied_cells > 0 && samples.count() > 0 &&
      kernel_extent <= 2 * max_dim) {
    t = Clock::now();
    const EncodedKernelSet kernels =
        build_encoded_kernels(request.gripper, samples.rotations,
                              cfg.voxel_size);
    out.kernels_built = kernels.count();
    out.t_kernels_ms = ms_since(t);

    // Convolve in orientation batches so the response volumes stay within
    // a fixed memory budget.
    const std::int64_t cells = grid.num_cells();
    const int batch = std::max<std::int64_t>(
        1, (64ll << 20) / (8 * std::max<std::int64_t>(cells, 1)));
    for (int base = 0; base < kernels.count(); base += batch) {
      const int count = std::min(batch, kernels.count() - base);
      EncodedKernelSet part;
      part.size = kernels.size;
      part.center = kernels.center;
      part.cup_count = kernels.cup_count;
      part.kernels.assign(kernels.kernels.begin() + base,
                          kernels.kernels.begin() + base + count);
      part.collision_flags.assign(kernels.collision_flags.begin() + base,
                                  kernels.collision_flags.begin() + base +
                                      count);

      const auto tc = Clock::now();
      const ConvResult conv = conv3d_sparse(grid, part, threads);
      out.t_conv_ms += ms_since(tc);
      out.cells_convolved += cells * count;

      const auto td = Clock::now();
      auto part_cands = decode(conv, grid, samples, request.gripper, base);
      out.t_decode_ms += ms_since(td);
      candidates.insert(candidates.end(),
                        std::make_move_iterator(part_cands.begin()),
                        std::make_move_iterator(part_cands.end()));
    }

    out.raw_candidates = static_cast<int>(candidates.size());
    t = Clock::now();
    candidates = normal_direction_check(std::move(candidates), scene,
                                        cfg.voxel_size, cfg.eps_normal);
    out.checked_candidates = static_cast<int>(candidates.size());
    out.t_decode_ms += ms_since(t);
  }

  if (!candidates.empty()) {
    t = Clock::now();
    const ClusterMaps maps =
        cluster_affordance(scene, cfg.voxel_size, cfg.min_cluster_size);
    out.cluster_count = maps.num_clusters();
    out.plan = rank(std::move(candidates), scene, maps, cfg);
    out.t_rank_ms = ms_since(t);
    if (!out.plan.ranking.empty()) {
      out.status = PlanStatus::kMultiCup;
      out.t_total_ms = ms_since(t_start);
      return out;
    }
  }

  // No multi-cup candidate survived: single-cup grasp at the affordance
  // argmax.
  const int pixel = argmax_pixel(scene);
  if (pixel < 0) {
    out.status = PlanStatus::kNoSolution;
  } else {
    out.status = PlanStatus::kFallback;
    out.plan.optimal = fallback_candidate(scene, pixel, request);
    out.plan.ranking.clear();
  }
  out.t_total_ms = ms_since(t_start);
  return out;
}

}  // namespace multicup

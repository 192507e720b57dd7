#include "multicup/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace multicup {

std::vector<CandidateKey> candidate_keys(
    const std::vector<GraspCandidate>& candidates) {
  std::vector<CandidateKey> keys;
  keys.reserve(candidates.size());
  for (const auto& c : candidates)
    keys.push_back({c.orientation_index, c.cell, c.activation});
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<GraspCandidate> brute_force_candidates(
    const VoxelGrid& grid, const OrientationSamples& samples,
    const GripperSpec& gripper) {
  if (grid.num_cells() > 64ll * 64 * 64)
    throw std::invalid_argument("brute force refused: grid beyond 64^3");
  if (samples.count() > 128)
    throw std::invalid_argument("brute force refused: > 128 orientations");

  const int nc = gripper.cup_count();
  std::vector<GraspCandidate> out;
  for (int n = 0; n < samples.count(); ++n) {
    const Mat3& rot = samples.rotations[n];

    // Rotated cup offsets in cells, with the kernel builder's collision
    // rule: of cups sharing a cell only the first can ever activate.
    std::vector<std::array<int, 3>> offsets(nc);
    std::vector<bool> shadowed(nc, false);
    for (int i = 0; i < nc; ++i) {
      const Vec3 c = rot * gripper.cup_centers_local[i];
      for (int a = 0; a < 3; ++a)
        offsets[i][a] = quantize_cell(c[a], grid.voxel_size);
      for (int j = 0; j < i; ++j)
        if (!shadowed[j] && offsets[j] == offsets[i]) shadowed[i] = true;
    }

    for (int m = 0; m < grid.dims[0]; ++m) {
      for (int t = 0; t < grid.dims[1]; ++t) {
        for (int p = 0; p < grid.dims[2]; ++p) {
          GraspCandidate cand;
          cand.activation.resize(nc);
          int active = 0;
          for (int i = 0; i < nc; ++i) {
            const bool hit = !shadowed[i] &&
                             grid.occupied(m + offsets[i][0], t + offsets[i][1],
                                           p + offsets[i][2]);
            cand.activation[i] = hit ? 1 : 0;
            active += cand.activation[i];
          }
          if (active < 2) continue;
          cand.position = grid.cell_center(m, t, p);
          cand.orientation = rot;
          for (int i = 0; i < nc; ++i)
            cand.cup_centers_world.push_back(
                rot * gripper.cup_centers_local[i] + cand.position);
          cand.source = GraspSource::kMultiCup;
          cand.orientation_index = n;
          cand.cell = {m, t, p};
          out.push_back(std::move(cand));
        }
      }
    }
  }
  return out;
}

ConditionReport check_conditions(const GraspCandidate& cand,
                                 const AffordanceScene& scene,
                                 const PlannerConfig& cfg) {
  ConditionReport rep;
  const Vec3 ng = cand.axis();
  const double guard = cfg.voxel_size * std::sqrt(3.0);

  int active = 0;
  bool contacts_ok = true, normals_ok = true;
  for (size_t i = 0; i < cand.activation.size(); ++i) {
    if (!cand.activation[i]) continue;
    ++active;
    const Vec3& cup = cand.cup_centers_world[i];

    // Exhaustive nearest affordance-masked point.
    int nearest = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < scene.size(); ++idx) {
      if (!(scene.affordance[idx] > 0.f) || !scene.valid_at(idx)) continue;
      const double d2 = (scene.points[idx] - cup).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        nearest = idx;
      }
    }
    if (nearest < 0) {
      contacts_ok = false;
      normals_ok = false;
      continue;
    }

    const Vec3& cp = scene.points[nearest];
    const double cdist = std::sqrt(best_d2);
    rep.contact_dist = std::max(rep.contact_dist, cdist);
    if (cdist > guard) contacts_ok = false;

    rep.coplanarity = std::max(rep.coplanarity,
                               std::abs((cp - cand.position).dot(ng)));

    const double d_cp = (cp - cand.position).norm();
    const double d0 = (cand.cup_centers_world[i] - cand.position).norm();
    rep.distance_residual =
        std::max(rep.distance_residual, std::abs(d_cp - d0));

    const Vec3& n = scene.normals[nearest];
    if (!n.allFinite()) {
      normals_ok = false;
    } else {
      rep.normal_angle = std::max(rep.normal_angle,
                                  angle_from_dot(n.dot(ng)));
    }
  }

  rep.cond_contacts = active >= 2 && contacts_ok;
  rep.cond_coplanar = rep.coplanarity <= cfg.voxel_size;
  rep.cond_normals = normals_ok && rep.normal_angle < cfg.eps_normal;
  rep.cond_distances = rep.distance_residual < cfg.eps_dist;
  return rep;
}

RandomInstance random_instance(std::mt19937& rng, int max_dim,
                               int max_orientations) {
  if (max_dim < 1 || max_orientations < 1)
    throw std::invalid_argument("random_instance: bounds must be positive");
  RandomInstance inst;

  std::uniform_int_distribution<int> dim_dist(std::min(12, max_dim), max_dim);
  std::uniform_real_distribution<double> occ_dist(0.02, 0.10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> voxel_dist(0.004, 0.010);
  std::uniform_real_distribution<double> origin_dist(-0.5, 0.5);
  std::uniform_int_distribution<int> nori_dist(std::min(4, max_orientations),
                                               max_orientations);
  std::uniform_real_distribution<double> angle_dist(-kPi, kPi);
  std::uniform_real_distribution<double> phi_dist(0.0, kPi / 2);

  inst.grid.voxel_size = voxel_dist(rng);
  inst.grid.b_min = Vec3(origin_dist(rng), origin_dist(rng), origin_dist(rng));
  for (int a = 0; a < 3; ++a) inst.grid.dims[a] = dim_dist(rng);
  inst.grid.b_max =
      inst.grid.b_min + Vec3(inst.grid.dims[0], inst.grid.dims[1],
                             inst.grid.dims[2]) *
                            inst.grid.voxel_size;
  const double occupancy = occ_dist(rng);
  inst.grid.occupancy.resize(inst.grid.num_cells());
  inst.grid.cell_slot.assign(inst.grid.num_cells(), -1);
  for (auto& o : inst.grid.occupancy) o = unit(rng) < occupancy ? 1 : 0;

  if (unit(rng) < 0.5) {
    const double d = 0.02 + 0.04 * unit(rng);
    inst.gripper.cup_centers_local = {{-d, 0, 0}, {d, 0, 0}};
  } else {
    const double a = 0.02 + 0.03 * unit(rng);
    const double b = 0.02 + 0.03 * unit(rng);
    inst.gripper.cup_centers_local = {
        {-a, -b, 0}, {a, -b, 0}, {-a, b, 0}, {a, b, 0}};
  }

  const int n_ori = nori_dist(rng);
  for (int n = 0; n < n_ori; ++n) {
    const double theta = angle_dist(rng);
    const double phi = phi_dist(rng);
    const double gamma = angle_dist(rng);
    inst.samples.rotations.push_back(zyz_rotation(theta, phi, gamma));
    inst.samples.angles.push_back({theta, phi, gamma});
    inst.samples.orientation_keys.push_back({-1, -1});
  }
  return inst;
}

}  // namespace multicup

#pragma once

#include <random>

#include "multicup/decode.hpp"

namespace multicup {

/// Candidate identity used for oracle set comparison: orientation index,
/// grid cell, activation mask.
struct CandidateKey {
  int orientation;
  std::array<int, 3> cell;
  std::vector<uint8_t> activation;

  bool operator==(const CandidateKey&) const = default;
  bool operator<(const CandidateKey& o) const {
    if (orientation != o.orientation) return orientation < o.orientation;
    if (cell != o.cell) return cell < o.cell;
    return activation < o.activation;
  }
};

std::vector<CandidateKey> candidate_keys(
    const std::vector<GraspCandidate>& candidates);

/// Direct re-derivation of the conv+decode result without kernels or
/// convolution: for every orientation and cell, quantize each rotated cup
/// center offset with the shared floor rule and read occupancy at
/// cell + offset. Keeps masks activating >= 2 cups. Mirrors the kernel
/// builder's collision rule (colliding cups beyond the first never
/// activate). Guarded to <= 64^3 cells and <= 128 orientations; beyond
/// that it throws std::invalid_argument.
std::vector<GraspCandidate> brute_force_candidates(
    const VoxelGrid& grid, const OrientationSamples& samples,
    const GripperSpec& gripper);

/// First-principles validity of one grasp against the raw scene, no
/// pipeline intermediates. Contact point of an active cup = the nearest
/// affordance-masked scene point to its center (found by exhaustive scan).
struct ConditionReport {
  // 1: >= 2 active cups, each with a masked contact inside sqrt(3)*l.
  bool cond_contacts = false;
  // 2: TCP and contacts coplanar perpendicular to the gripper axis.
  bool cond_coplanar = false;
  // 3: every contact normal within eps_normal of the gripper axis.
  bool cond_normals = false;
  // 4: | ||cp_i - P|| - ||C0_i|| | < eps_dist for every active cup.
  bool cond_distances = false;

  double contact_dist = 0.0;        // max cup-center-to-contact distance
  double coplanarity = 0.0;         // max |(cp_i - P) . n_g|
  double normal_angle = 0.0;        // max contact-normal angle, radians
  double distance_residual = 0.0;   // max | d_cp_i - d0_i |

  bool all_ok() const {
    return cond_contacts && cond_coplanar && cond_normals && cond_distances;
  }
};

/// Checks Conditions 1-4 for a candidate. Coplanarity passes at residual
/// <= voxel_size (the TCP sits at a cell center, so contacts on the
/// surface sit within a cell of its plane).
ConditionReport check_conditions(const GraspCandidate& cand,
                                 const AffordanceScene& scene,
                                 const PlannerConfig& cfg);

/// Random voxel grid + gripper + orientation set for oracle-equivalence
/// runs: grid <= 32^3 at 2-10% occupancy, 4-16 orientations, two- or
/// four-cup gripper. max_dim / max_orientations tighten those upper
/// bounds (the lower bounds clamp down to them when smaller).
struct RandomInstance {
  VoxelGrid grid;
  GripperSpec gripper;
  OrientationSamples samples;
};
RandomInstance random_instance(std::mt19937& rng, int max_dim = 32,
                               int max_orientations = 16);

}  // namespace multicup

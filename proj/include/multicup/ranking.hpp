#pragma once

#include <vector>

#include "multicup/decode.hpp"

namespace multicup {

/// Image-space cluster maps over affordance-positive pixels.
///
/// A cluster's "center pixel" is the member pixel whose 3-D point lies
/// nearest the cluster centroid (the medoid); `dist` measures from that
/// pixel's point so it is exactly 0 there.
struct ClusterMaps {
  int width = 0, height = 0;
  std::vector<int> label;    // -1 background, else 0..num_clusters-1
  std::vector<float> dist;   // meters to own cluster's center point
  std::vector<Vec3> orient;  // own cluster's first principal axis

  // Per-cluster data.
  std::vector<Vec3> centroid;               // mean 3-D point
  std::vector<Vec3> center_point;           // medoid pixel's 3-D point
  std::vector<std::array<Vec3, 2>> axes;    // two principal axes, unit
  std::vector<float> max_dist;              // max of dist over the cluster
  std::vector<int> size;                    // pixels

  int num_clusters() const { return static_cast<int>(size.size()); }
  int label_at(int v, int u) const { return label[size_t(v) * width + u]; }
  float dist_at(int v, int u) const { return dist[size_t(v) * width + u]; }
};

/// Connected components (8-connectivity) over pixels with affordance > 0
/// and valid points, split where adjacent pixels are farther than
/// 2 * voxel_size apart in 3-D. Components below min_cluster_size become
/// background.
ClusterMaps cluster_affordance(const AffordanceScene& scene, double voxel_size,
                               int min_cluster_size);

/// Projects a world point into the scene camera; false when it falls
/// outside the image.
bool project_to_pixel(const AffordanceScene& scene, const Vec3& p, int& u,
                      int& v);

/// Score of one candidate against the cluster maps, or invalid when no
/// active cup lands on a labeled pixel.
struct ScoredCandidate {
  bool valid = false;
  std::vector<int> contact_labels;  // sorted unique labels under active cups
  ScoreBreakdown score;
};

/// Projects active cup centers into the image, collects their cluster
/// labels (maxObj = distinct count), and composes
/// J = w_o*J_orient - w_d*Jd - w_v*Jv where Jd/Jv are the per-label
/// center-distance terms normalized by each cluster's max dist.
ScoredCandidate score_candidate(const GraspCandidate& cand,
                                const AffordanceScene& scene,
                                const ClusterMaps& maps,
                                const PlannerConfig& cfg);

/// Scores every candidate and sorts by (max_obj desc, J desc), breaking
/// exact ties by (orientation_index, cell) for reproducibility. Candidates
/// with no labeled contact are dropped; an empty ranking tells the planner
/// to fall back.
RankedPlan rank(std::vector<GraspCandidate> candidates,
                const AffordanceScene& scene, const ClusterMaps& maps,
                const PlannerConfig& cfg);

}  // namespace multicup

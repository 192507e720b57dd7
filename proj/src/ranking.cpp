#include "multicup/ranking.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace multicup {
namespace {

/// Two dominant directions of a point set: eigenvectors of the covariance
/// for the two largest eigenvalues. Falls back to fixed axes for
/// degenerate (single-point) sets.
std::array<Vec3, 2> principal_axes(const std::vector<Vec3>& pts,
                                   const Vec3& mean) {
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  // Eigenvalues ascending: columns 2 and 1 are the two dominant axes.
  Vec3 a0 = es.eigenvectors().col(2);
  Vec3 a1 = es.eigenvectors().col(1);
  if (!a0.allFinite() || a0.norm() < 0.5) a0 = Vec3::UnitX();
  if (!a1.allFinite() || a1.norm() < 0.5) a1 = Vec3::UnitY();
  return {a0.normalized(), a1.normalized()};
}

/// Direction of the polygon formed by the cup centers: segment direction
/// for two cups, dominant covariance eigenvector for three or more.
Vec3 cup_polygon_direction(const std::vector<Vec3>& cups) {
  if (cups.size() == 2) return (cups[1] - cups[0]).normalized();
  Vec3 mean = Vec3::Zero();
  for (const Vec3& c : cups) mean += c;
  mean /= double(cups.size());
  return principal_axes(cups, mean)[0];
}

}  // namespace

ClusterMaps cluster_affordance(const AffordanceScene& scene, double voxel_size,
                               int min_cluster_size) {
  ClusterMaps maps;
  maps.width = scene.width;
  maps.height = scene.height;
  maps.label.assign(scene.size(), -1);
  maps.dist.assign(scene.size(), 0.f);
  maps.orient.assign(scene.size(), Vec3::UnitX());

  const double max_gap2 = 4.0 * voxel_size * voxel_size;
  auto maskable = [&](int idx) {
    return scene.affordance[idx] > 0.f && scene.valid_at(idx);
  };

  // Flood fill with 8-connectivity, splitting across 3-D gaps.
  std::vector<int> raw_label(scene.size(), -1);
  std::vector<std::vector<int>> components;
  std::vector<int> stack;
  for (int seed = 0; seed < scene.size(); ++seed) {
    if (raw_label[seed] >= 0 || !maskable(seed)) continue;
    const int comp = static_cast<int>(components.size());
    components.emplace_back();
    raw_label[seed] = comp;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      components[comp].push_back(idx);
      const int v = idx / scene.width, u = idx % scene.width;
      for (int dv = -1; dv <= 1; ++dv) {
        for (int du = -1; du <= 1; ++du) {
          if (dv == 0 && du == 0) continue;
          const int nv = v + dv, nu = u + du;
          if (nv < 0 || nv >= scene.height || nu < 0 || nu >= scene.width)
            continue;
          const int nidx = scene.index(nv, nu);
          if (raw_label[nidx] >= 0 || !maskable(nidx)) continue;
          if ((scene.points[nidx] - scene.points[idx]).squaredNorm() >
              max_gap2)
            continue;
          raw_label[nidx] = comp;
          stack.push_back(nidx);
        }
      }
    }
  }

  for (const auto& comp : components) {
    if (static_cast<int>(comp.size()) < min_cluster_size) continue;
    const int cl = maps.num_clusters();

    Vec3 centroid = Vec3::Zero();
    for (int idx : comp) centroid += scene.points[idx];
    centroid /= double(comp.size());

    // Center point = the member nearest the centroid (ties: lowest pixel
    // index, comp is in flood order so scan for the strict minimum).
    int medoid = comp[0];
    double medoid_d2 = (scene.points[medoid] - centroid).squaredNorm();
    for (int idx : comp) {
      const double d2 = (scene.points[idx] - centroid).squaredNorm();
      if (d2 < medoid_d2 || (d2 == medoid_d2 && idx < medoid)) {
        medoid_d2 = d2;
        medoid = idx;
      }
    }
    const Vec3 center = scene.points[medoid];

    std::vector<Vec3> pts;
    pts.reserve(comp.size());
    for (int idx : comp) pts.push_back(scene.points[idx]);
    const auto axes = principal_axes(pts, centroid);

    float maxd = 0.f;
    for (int idx : comp) {
      const float d = static_cast<float>((scene.points[idx] - center).norm());
      maps.label[idx] = cl;
      maps.dist[idx] = d;
      maps.orient[idx] = axes[0];
      maxd = std::max(maxd, d);
    }

    maps.centroid.push_back(centroid);
    maps.center_point.push_back(center);
    maps.axes.push_back(axes);
    maps.max_dist.push_back(maxd);
    maps.size.push_back(static_cast<int>(comp.size()));
  }
  return maps;
}

bool project_to_pixel(const AffordanceScene& scene, const Vec3& p, int& u,
                      int& v) {
  const Mat4 world_to_cam = scene.camera.camera_to_world.inverse();
  const Vec3 pc = world_to_cam.topLeftCorner<3, 3>() * p +
                  world_to_cam.topRightCorner<3, 1>();
  if (!(pc.z() > 0.0)) return false;
  u = static_cast<int>(
      std::lround(pc.x() / pc.z() * scene.camera.fx + scene.camera.cx));
  v = static_cast<int>(
      std::lround(pc.y() / pc.z() * scene.camera.fy + scene.camera.cy));
  return u >= 0 && u < scene.width && v >= 0 && v < scene.height;
}

ScoredCandidate score_candidate(const GraspCandidate& cand,
                                const AffordanceScene& scene,
                                const ClusterMaps& maps,
                                const PlannerConfig& cfg) {
  ScoredCandidate sc;

  // Cluster labels under the active cups, with each cup's image position.
  struct CupHit {
    int label;
    int u, v;
    Vec3 world;
  };
  std::vector<CupHit> hits;
  for (size_t i = 0; i < cand.activation.size(); ++i) {
    if (!cand.activation[i]) continue;
    int u, v;
    if (!project_to_pixel(scene, cand.cup_centers_world[i], u, v)) continue;
    const int label = maps.label_at(v, u);
    if (label < 0) continue;  // background pixel contributes no label
    hits.push_back({label, u, v, cand.cup_centers_world[i]});
  }
  if (hits.empty()) return sc;  // invalid: no labeled contact

  for (const CupHit& h : hits) sc.contact_labels.push_back(h.label);
  std::sort(sc.contact_labels.begin(), sc.contact_labels.end());
  sc.contact_labels.erase(
      std::unique(sc.contact_labels.begin(), sc.contact_labels.end()),
      sc.contact_labels.end());

  sc.score.max_obj = static_cast<int>(sc.contact_labels.size());

  // Per contacted label: distance term = M_dist at the pixel of the mean
  // image coordinate of that label's cups; orientation term = best |dot|
  // of the cup-polygon direction against the label's principal axes.
  std::vector<double> dist_terms, norm_terms, orient_terms;
  for (int label : sc.contact_labels) {
    double mu = 0.0, mv = 0.0;
    std::vector<Vec3> cups;
    for (const CupHit& h : hits) {
      if (h.label != label) continue;
      mu += h.u;
      mv += h.v;
      cups.push_back(h.world);
    }
    const double count = static_cast<double>(cups.size());
    const int pu = static_cast<int>(std::lround(mu / count));
    const int pv = static_cast<int>(std::lround(mv / count));

    double term;
    if (pu >= 0 && pu < maps.width && pv >= 0 && pv < maps.height &&
        maps.label_at(pv, pu) == label) {
      term = maps.dist_at(pv, pu);
    } else {
      // Mean pixel fell off the cluster (concave shape); measure directly.
      Vec3 mean = Vec3::Zero();
      for (const Vec3& c : cups) mean += c;
      mean /= count;
      term = (mean - maps.center_point[label]).norm();
    }
    dist_terms.push_back(term);
    const double maxd = maps.max_dist[label];
    norm_terms.push_back(maxd > 1e-12 ? term / maxd : 0.0);

    if (cups.size() < 2) {
      orient_terms.push_back(1.0);  // a lone cup has no polygon: neutral
    } else {
      const Vec3 dir = cup_polygon_direction(cups);
      const double dot = std::max(std::abs(dir.dot(maps.axes[label][0])),
                                  std::abs(dir.dot(maps.axes[label][1])));
      orient_terms.push_back(std::min(1.0, dot));
    }
  }

  auto mean_of = [](const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  };
  auto var_of = [&](const std::vector<double>& xs) {
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / double(xs.size());
  };

  sc.score.j_dist = mean_of(dist_terms);
  sc.score.j_var = var_of(dist_terms);
  sc.score.j_orient = mean_of(orient_terms);
  sc.score.j = cfg.w_orient * sc.score.j_orient -
               cfg.w_dist * mean_of(norm_terms) - cfg.w_var * var_of(norm_terms);
  sc.valid = true;
  return sc;
}

RankedPlan rank(std::vector<GraspCandidate> candidates,
                const AffordanceScene& scene, const ClusterMaps& maps,
                const PlannerConfig& cfg) {
  RankedPlan plan;
  for (auto& cand : candidates) {
    ScoredCandidate sc = score_candidate(cand, scene, maps, cfg);
    if (!sc.valid) continue;
    plan.ranking.push_back(
        {std::move(sc.contact_labels), sc.score, std::move(cand)});
  }
  std::sort(plan.ranking.begin(), plan.ranking.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.score.max_obj != b.score.max_obj)
                return a.score.max_obj > b.score.max_obj;
              if (a.score.j != b.score.j) return a.score.j > b.score.j;
              if (a.candidate.orientation_index != b.candidate.orientation_index)
                return a.candidate.orientation_index <
                       b.candidate.orientation_index;
              return a.candidate.cell < b.candidate.cell;
            });
  if (!plan.ranking.empty()) plan.optimal = plan.ranking.front().candidate;
  return plan;
}

}  // namespace multicup

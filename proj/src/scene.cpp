#include "multicup/scene.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>

#include <json.hpp>

#include "multicup/npy.hpp"
#include "multicup/parallel.hpp"

namespace multicup {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Static median-split KD-tree over 3-D points, k-nearest-neighbor queries
/// with a bounded max-heap.
class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& pts, std::vector<int> ids)
      : points_(pts), ids_(std::move(ids)) {
    if (!ids_.empty()) build(0, static_cast<int>(ids_.size()), 0);
  }

  /// Fills `out` with the indices (into the original point array) of the k
  /// points nearest to q, unordered.
  void knn(const Vec3& q, int k, std::vector<int>& out) const {
    out.clear();
    if (ids_.empty()) return;
    Heap heap;
    search(0, static_cast<int>(ids_.size()), 0, q, k, heap);
    while (!heap.empty()) {
      out.push_back(heap.top().second);
      heap.pop();
    }
  }

 private:
  using HeapItem = std::pair<double, int>;  // (squared distance, point id)
  using Heap = std::priority_queue<HeapItem>;

  const std::vector<Vec3>& points_;
  std::vector<int> ids_;  // reordered in place; subtree = contiguous range

  void build(int lo, int hi, int depth) {
    if (hi - lo <= 1) return;
    const int axis = depth % 3;
    const int mid = (lo + hi) / 2;
    std::nth_element(ids_.begin() + lo, ids_.begin() + mid, ids_.begin() + hi,
                     [&](int a, int b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  void search(int lo, int hi, int depth, const Vec3& q, int k,
              Heap& heap) const {
    if (hi <= lo) return;
    const int axis = depth % 3;
    const int mid = (lo + hi) / 2;
    const int id = ids_[mid];
    const double d2 = (points_[id] - q).squaredNorm();
    if (static_cast<int>(heap.size()) < k) {
      heap.emplace(d2, id);
    } else if (d2 < heap.top().first) {
      heap.pop();
      heap.emplace(d2, id);
    }
    const double delta = q[axis] - points_[id][axis];
    const int near_lo = delta < 0 ? lo : mid + 1;
    const int near_hi = delta < 0 ? mid : hi;
    const int far_lo = delta < 0 ? mid + 1 : lo;
    const int far_hi = delta < 0 ? hi : mid;
    search(near_lo, near_hi, depth + 1, q, k, heap);
    if (static_cast<int>(heap.size()) < k ||
        delta * delta < heap.top().first) {
      search(far_lo, far_hi, depth + 1, q, k, heap);
    }
  }
};

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0))
    throw std::invalid_argument("focal lengths must be positive");
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("image dimensions must be positive");
  if (!camera_to_world.allFinite())
    throw std::invalid_argument("non-finite camera_to_world");
}

CameraIntrinsics load_intrinsics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  CameraIntrinsics cam;
  try {
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    const auto& m = j.at("camera_to_world");
    if (!m.is_array() || m.size() != 16)
      throw IoError(path + ": camera_to_world must hold 16 numbers");
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        cam.camera_to_world(r, c) = m.at(r * 4 + c).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  try {
    cam.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
  return cam;
}

void save_intrinsics(const std::string& path, const CameraIntrinsics& cam) {
  nlohmann::json j;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  j["width"] = cam.width;
  j["height"] = cam.height;
  std::vector<double> m(16);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m[r * 4 + c] = cam.camera_to_world(r, c);
  j["camera_to_world"] = m;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<Vec3> depth_to_pointcloud(const Image<float>& depth,
                                      const CameraIntrinsics& cam) {
  if (depth.rows != cam.height || depth.cols != cam.width)
    throw std::invalid_argument("depth shape does not match intrinsics");
  const Mat3 rot = cam.camera_to_world.topLeftCorner<3, 3>();
  const Vec3 trans = cam.camera_to_world.topRightCorner<3, 1>();
  std::vector<Vec3> points(static_cast<size_t>(depth.rows) * depth.cols,
                           Vec3(kNaN, kNaN, kNaN));
  for (int v = 0; v < depth.rows; ++v) {
    for (int u = 0; u < depth.cols; ++u) {
      const float d = depth.at(v, u);
      if (!(d > 0.f) || !std::isfinite(d)) continue;
      const Vec3 pc((u - cam.cx) * d / cam.fx, (v - cam.cy) * d / cam.fy, d);
      points[size_t(v) * depth.cols + u] = rot * pc + trans;
    }
  }
  return points;
}

std::vector<Vec3> estimate_normals(const std::vector<Vec3>& points, int width,
                                   int height, int k) {
  if (static_cast<int>(points.size()) != width * height)
    throw std::invalid_argument("point count does not match image shape");
  std::vector<Vec3> normals(points.size(), Vec3(kNaN, kNaN, kNaN));

  std::vector<int> valid;
  valid.reserve(points.size());
  for (int i = 0; i < static_cast<int>(points.size()); ++i)
    if (std::isfinite(points[i].x())) valid.push_back(i);
  if (static_cast<int>(valid.size()) < k) return normals;

  const KdTree tree(points, valid);
  const int threads = resolve_threads(0);
  parallel_for_chunks(valid.size(), threads, [&](size_t begin, size_t end) {
    std::vector<int> nn;
    for (size_t vi = begin; vi < end; ++vi) {
      const int idx = valid[vi];
      tree.knn(points[idx], k, nn);
      Vec3 mean = Vec3::Zero();
      for (int j : nn) mean += points[j];
      mean /= double(nn.size());
      Mat3 cov = Mat3::Zero();
      for (int j : nn) {
        const Vec3 d = points[j] - mean;
        cov += d * d.transpose();
      }
      Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
      if (es.info() != Eigen::Success) continue;
      // Coplanar-degenerate neighborhoods (all points identical) have no
      // defined normal.
      if (es.eigenvalues()(2) <= 0.0) continue;
      Vec3 n = es.eigenvectors().col(0);
      if (n.z() < 0.0) n = -n;
      normals[idx] = n.normalized();
    }
  });
  return normals;
}

AffordanceScene make_scene(const Image<float>& depth,
                           const Image<float>& affordance,
                           const CameraIntrinsics& cam, int normal_k) {
  if (!depth.same_shape(affordance.rows, affordance.cols))
    throw std::invalid_argument("depth and affordance shapes differ");
  cam.validate();
  AffordanceScene scene;
  scene.width = depth.cols;
  scene.height = depth.rows;
  scene.camera = cam;
  scene.points = depth_to_pointcloud(depth, cam);
  scene.normals = estimate_normals(scene.points, scene.width, scene.height,
                                   normal_k);
  scene.affordance.assign(affordance.data.begin(), affordance.data.end());
  for (int i = 0; i < scene.size(); ++i) {
    if (!scene.valid_at(i)) scene.affordance[i] = 0.f;
  }
  return scene;
}

AffordanceScene load_scene(const std::string& depth_path,
                           const std::string& affordance_path,
                           const std::string& intrinsics_path, int normal_k) {
  const Image<float> depth = read_npy_f32(depth_path);
  const Image<float> affordance = read_npy_f32(affordance_path);
  const CameraIntrinsics cam = load_intrinsics(intrinsics_path);
  if (depth.rows != cam.height || depth.cols != cam.width)
    throw IoError(depth_path + ": shape does not match intrinsics");
  if (!depth.same_shape(affordance.rows, affordance.cols))
    throw IoError(affordance_path + ": shape does not match depth");
  return make_scene(depth, affordance, cam, normal_k);
}

}  // namespace multicup

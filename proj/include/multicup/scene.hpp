#pragma once

#include <string>
#include <vector>

#include "multicup/types.hpp"

namespace multicup {

struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
  int width = 0, height = 0;
  Mat4 camera_to_world = Mat4::Identity();

  void validate() const;
};

/// Loads intrinsics from JSON: {fx, fy, cx, cy, width, height,
/// camera_to_world: [16 row-major doubles]}.
CameraIntrinsics load_intrinsics(const std::string& path);
void save_intrinsics(const std::string& path, const CameraIntrinsics& cam);

/// Organized scene: one world-frame point, normal, and affordance value per
/// pixel. Invalid pixels (depth <= 0 or non-finite) carry NaN points.
struct AffordanceScene {
  int width = 0, height = 0;
  std::vector<Vec3> points;      // row-major, height*width
  std::vector<Vec3> normals;     // unit, z >= 0, NaN where undefined
  std::vector<float> affordance; // [0, 1], 0 at invalid pixels
  CameraIntrinsics camera;

  int size() const { return width * height; }
  bool valid_at(int idx) const { return std::isfinite(points[idx].x()); }
  int index(int v, int u) const { return v * width + u; }
};

/// Pinhole back-projection of a depth image into world-frame points.
/// Depth is the camera-frame z coordinate in meters.
std::vector<Vec3> depth_to_pointcloud(const Image<float>& depth,
                                      const CameraIntrinsics& cam);

/// Per-pixel normals via PCA over the k nearest valid scene points
/// (self-inclusive). Normals are flipped to world z >= 0 and NaN when the
/// scene has fewer than k valid points or the neighborhood is degenerate.
std::vector<Vec3> estimate_normals(const std::vector<Vec3>& points,
                                   int width, int height, int k);

/// Assembles a scene from already-loaded images. The affordance image must
/// match the depth shape; affordance is forced to 0 at invalid pixels.
AffordanceScene make_scene(const Image<float>& depth,
                           const Image<float>& affordance,
                           const CameraIntrinsics& cam, int normal_k);

/// make_scene over files: depth NPY + affordance NPY + intrinsics JSON.
AffordanceScene load_scene(const std::string& depth_path,
                           const std::string& affordance_path,
                           const std::string& intrinsics_path, int normal_k);

}  // namespace multicup

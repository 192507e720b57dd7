#pragma once

#include <string>
#include <vector>

#include "multicup/scene.hpp"

namespace multicup {

/// Analytic primitives for synthetic scenes. Everything rests on or above
/// the world z = 0 plane and is imaged by a top-down camera at world
/// (0, 0, camera_z).
struct Primitive {
  enum class Kind { kBox, kSphere } kind = Kind::kBox;
  // kBox: axis-aligned, base on z = 0, top at z = height, center (cx, cy),
  //       half-extents (hx, hy).
  // kSphere: center (cx, cy, cz), radius r.
  double cx = 0.0, cy = 0.0, cz = 0.0;
  double hx = 0.0, hy = 0.0;
  double height = 0.0;
  double radius = 0.0;

  double top_z() const {
    return kind == Kind::kBox ? height : cz + radius;
  }
};

struct SceneSpec {
  int width = 241, height = 181;
  double fx = 500.0, fy = 500.0;
  double camera_z = 0.6;
  std::vector<Primitive> primitives;
  bool plane_graspable = false;  // affordance on the z = 0 background plane
  double plane_half_extent = 0.10;  // graspable plane patch half-size
  double normal_cutoff = deg2rad(11.5);  // top-facing test for affordance
  double edge_margin = 0.012;  // affordance clearance from region edges
  bool radial_ramp = false;    // affordance 1 at region center -> 0.5 at rim
  unsigned seed = 0;           // reserved for optional depth noise

  void validate() const;
};

struct GroundTruth {
  Image<float> depth;
  Image<float> affordance;
  CameraIntrinsics camera;
  std::vector<int> primitive_id;  // per pixel: index, -1 plane, -2 no hit
  std::vector<Vec3> normal;       // analytic world normal per pixel
  // Graspable-region outline per affordable region (world frame, closed
  // polygon, counterclockwise seen from above).
  std::vector<std::vector<Vec3>> regions;
  int argmax_u = -1, argmax_v = -1;  // unique affordance argmax (ramp scenes)
};

struct RenderedScene {
  AffordanceScene scene;  // estimated normals, the pipeline-real path
  GroundTruth gt;
};

/// Ray-casts the primitives into depth/affordance/normal images and builds
/// the matching AffordanceScene via the standard back-projection and
/// normal-estimation path.
RenderedScene render_scene(const SceneSpec& spec, int normal_k = 16);

/// Largest number of distinct primitives a vertical gripper can contact at
/// once, by sweeping TCP (x, y) and yaw over a grid. Cups contact a
/// primitive when they land inside its affordable (inset) top region; a
/// pose counts only when >= 2 cups contact at one height.
int expected_max_obj(const SceneSpec& spec, const GripperSpec& gripper,
                     double xy_step = 0.0025, int yaw_steps = 72);

/// Writes depth.npy, affordance.npy, intrinsics.json into dir.
void save_scene_files(const GroundTruth& gt, const std::string& dir);

/// Named presets used by the CLI and tests: flat-plate, two-boxes,
/// small-blob, sphere-cap, three-boxes.
SceneSpec preset_scene(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace multicup

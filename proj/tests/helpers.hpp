#pragma once

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <string>

#include "multicup/scene.hpp"

namespace multicup::testing {

/// Scene on a flat plane at camera depth `depth`, identity camera pose
/// (camera at the world origin looking down +z). Pixel (v, u) maps to
/// world ((u - cx)/fx * depth, (v - cy)/fy * depth, depth), so pixel pitch
/// in meters is depth / fx. Affordance comes from the per-pixel functor;
/// normals are the exact plane normal (0, 0, 1).
inline AffordanceScene flat_scene(
    int width, int height, double fx, double depth,
    const std::function<float(int v, int u)>& affordance_of) {
  AffordanceScene s;
  s.width = width;
  s.height = height;
  s.camera.fx = fx;
  s.camera.fy = fx;
  s.camera.cx = 0.5 * (width - 1);
  s.camera.cy = 0.5 * (height - 1);
  s.camera.width = width;
  s.camera.height = height;
  s.points.resize(s.size());
  s.normals.assign(s.size(), Vec3(0, 0, 1));
  s.affordance.resize(s.size());
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const int i = s.index(v, u);
      s.points[i] = Vec3((u - s.camera.cx) / s.camera.fx * depth,
                         (v - s.camera.cy) / s.camera.fy * depth, depth);
      s.affordance[i] = affordance_of(v, u);
    }
  }
  return s;
}

/// Fresh directory under the system temp root; removed by the caller when
/// it cares, leaked otherwise (the OS temp dir is disposable).
inline std::string temp_dir(const std::string& tag) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("multicup_" + tag + "_" + std::to_string(::getpid()) +
                    "_" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace multicup::testing

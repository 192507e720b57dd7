#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace multicup {

inline constexpr double kPi = std::numbers::pi;

/// Raised when an input file is missing, malformed, or inconsistent.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a scene has no affordance-positive pixels.
class EmptySceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major 2D array. Pixel access is (row v, column u).
template <typename T>
struct Image {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;

  Image() = default;
  Image(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}
  Image(int r, int c, T fill)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  T& at(int v, int u) { return data[static_cast<size_t>(v) * cols + u]; }
  const T& at(int v, int u) const {
    return data[static_cast<size_t>(v) * cols + u];
  }
  size_t size() const { return data.size(); }
  bool in_bounds(int v, int u) const {
    return v >= 0 && v < rows && u >= 0 && u < cols;
  }
  bool same_shape(int r, int c) const { return rows == r && cols == c; }
};

/// Floor division robust to values sitting a hair below a cell boundary.
/// Rotating a point that lies exactly on a boundary produces coordinates
/// like -2.4e-18, which plain floor() would push into the wrong cell.
inline int quantize_cell(double value, double cell) {
  return static_cast<int>(std::floor(value / cell + 1e-9));
}

inline double clamp_unit(double x) { return std::max(-1.0, std::min(1.0, x)); }

/// Angle in radians between two unit vectors given their dot product.
inline double angle_from_dot(double d) { return std::acos(clamp_unit(d)); }

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace multicup

#pragma once

#include <string>

#include "multicup/common.hpp"

namespace multicup {

/// Reads a 2-D NPY v1.0 array of dtype <f4 in C order. Anything else —
/// bad magic, other versions, other dtypes, Fortran order, wrong rank —
/// raises IoError with the offending detail.
Image<float> read_npy_f32(const std::string& path);

/// Writes a 2-D float32 array as NPY v1.0, C order, little endian.
void write_npy_f32(const std::string& path, const Image<float>& img);

}  // namespace multicup

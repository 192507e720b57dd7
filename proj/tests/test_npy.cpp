#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "multicup/npy.hpp"

using namespace multicup;

namespace {

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("npy round trip preserves shape and values") {
  const std::string dir = testing::temp_dir("npy");
  Image<float> img(3, 5);
  for (int v = 0; v < 3; ++v)
    for (int u = 0; u < 5; ++u) img.at(v, u) = float(v * 10 + u) * 0.25f;
  img.at(1, 2) = -7.5f;

  const std::string path = dir + "/a.npy";
  write_npy_f32(path, img);
  const Image<float> back = read_npy_f32(path);
  REQUIRE(back.rows == 3);
  REQUIRE(back.cols == 5);
  CHECK(back.data == img.data);
}

TEST_CASE("npy header is v1.0 with 64-byte alignment") {
  const std::string dir = testing::temp_dir("npy");
  const std::string path = dir + "/b.npy";
  Image<float> img(2, 2);
  write_npy_f32(path, img);

  const std::string bytes = read_bytes(path);
  REQUIRE(bytes.size() >= 10);
  CHECK(bytes.substr(0, 6) == "\x93NUMPY");
  CHECK(bytes[6] == 1);  // major
  CHECK(bytes[7] == 0);  // minor
  const size_t header_len =
      static_cast<unsigned char>(bytes[8]) |
      (static_cast<unsigned char>(bytes[9]) << 8);
  CHECK((10 + header_len) % 64 == 0);
  CHECK(bytes[10 + header_len - 1] == '\n');
  CHECK(bytes.size() == 10 + header_len + 2 * 2 * sizeof(float));
}

TEST_CASE("npy reader rejects malformed files") {
  const std::string dir = testing::temp_dir("npy");
  const std::string good_path = dir + "/good.npy";
  write_npy_f32(good_path, Image<float>(2, 3));
  const std::string good = read_bytes(good_path);

  auto expect_reject = [&](const std::string& name, std::string bytes) {
    const std::string path = dir + "/" + name;
    write_bytes(path, bytes);
    CHECK_THROWS_AS(read_npy_f32(path), IoError);
  };

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  expect_reject("magic.npy", bad_magic);

  std::string v2 = good;
  v2[6] = 2;
  expect_reject("v2.npy", v2);

  expect_reject("truncated.npy", good.substr(0, good.size() - 5));
  expect_reject("header_only.npy", good.substr(0, 12));

  // Wrong dtype / order / rank are header-level rejections.
  auto patched_header = [&](const std::string& what, const std::string& with) {
    std::string b = good;
    const size_t at = b.find(what);
    REQUIRE(at != std::string::npos);
    b.replace(at, what.size(), with);
    return b;
  };
  expect_reject("big_endian.npy", patched_header("<f4", ">f4"));
  expect_reject("f8.npy", patched_header("<f4", "<f8"));
  expect_reject("fortran.npy", patched_header("False", "True "));
  expect_reject("missing.npy", "");
}

TEST_CASE("npy reader rejects non-2d shapes") {
  const std::string dir = testing::temp_dir("npy");
  // Hand-rolled v1.0 header with a 1-D shape.
  std::string header = "{'descr': '<f4', 'fortran_order': False, "
                       "'shape': (6,), }";
  while ((10 + header.size() + 1) % 64 != 0) header.push_back(' ');
  header.push_back('\n');
  std::string bytes = "\x93NUMPY";
  bytes.push_back(1);
  bytes.push_back(0);
  bytes.push_back(static_cast<char>(header.size() & 0xff));
  bytes.push_back(static_cast<char>(header.size() >> 8));
  bytes += header;
  bytes.append(6 * sizeof(float), '\0');
  const std::string path = dir + "/rank1.npy";
  write_bytes(path, bytes);
  CHECK_THROWS_AS(read_npy_f32(path), IoError);
}

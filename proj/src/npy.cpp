#include "multicup/npy.hpp"

#include <cstring>
#include <fstream>
#include <regex>

namespace multicup {
namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

}  // namespace

Image<float> read_npy_f32(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0)
    throw IoError(path + ": not an NPY file");

  unsigned char ver[2];
  in.read(reinterpret_cast<char*>(ver), 2);
  if (!in || ver[0] != 1 || ver[1] != 0)
    throw IoError(path + ": unsupported NPY version " +
                  std::to_string(int(ver[0])) + "." + std::to_string(int(ver[1])));

  unsigned char len_bytes[2];
  in.read(reinterpret_cast<char*>(len_bytes), 2);
  if (!in) throw IoError(path + ": truncated header");
  const size_t header_len = size_t(len_bytes[0]) | (size_t(len_bytes[1]) << 8);

  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw IoError(path + ": truncated header");

  std::smatch m;
  if (!std::regex_search(header, m,
                         std::regex(R"('descr'\s*:\s*'([^']*)')")))
    throw IoError(path + ": header missing descr");
  if (m[1] != "<f4")
    throw IoError(path + ": dtype " + m[1].str() + " unsupported (need <f4)");

  if (!std::regex_search(header, m,
                         std::regex(R"('fortran_order'\s*:\s*(True|False))")))
    throw IoError(path + ": header missing fortran_order");
  if (m[1] == "True")
    throw IoError(path + ": Fortran-ordered arrays unsupported");

  if (!std::regex_search(header, m,
                         std::regex(R"('shape'\s*:\s*\((\d+)\s*,\s*(\d+)\s*,?\s*\))")))
    throw IoError(path + ": need a 2-D shape");
  const long rows = std::stol(m[1]);
  const long cols = std::stol(m[2]);
  if (rows <= 0 || cols <= 0)
    throw IoError(path + ": degenerate shape");

  Image<float> img(static_cast<int>(rows), static_cast<int>(cols));
  in.read(reinterpret_cast<char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size() * sizeof(float)));
  if (!in) throw IoError(path + ": truncated data section");
  return img;
}

void write_npy_f32(const std::string& path, const Image<float>& img) {
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (" +
                     std::to_string(img.rows) + ", " + std::to_string(img.cols) +
                     "), }";
  // Pad with spaces so magic+version+len+dict is a multiple of 64, ending
  // in a newline.
  size_t unpadded = 6 + 2 + 2 + dict.size() + 1;
  size_t padding = (64 - unpadded % 64) % 64;
  dict.append(padding, ' ');
  dict.push_back('\n');

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(kMagic, 6);
  const unsigned char ver[2] = {1, 0};
  out.write(reinterpret_cast<const char*>(ver), 2);
  const size_t len = dict.size();
  const unsigned char len_bytes[2] = {static_cast<unsigned char>(len & 0xff),
                                      static_cast<unsigned char>(len >> 8)};
  out.write(reinterpret_cast<const char*>(len_bytes), 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size() * sizeof(float)));
  if (!out) throw IoError("short write to " + path);
}

}  // namespace multicup

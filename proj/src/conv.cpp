#include "multicup/conv.hpp"

#include <algorithm>
#include <stdexcept>

#include "multicup/parallel.hpp"

namespace multicup {
namespace {

void check_extent(const VoxelGrid& grid, const EncodedKernelSet& kernels) {
  const int dmax = std::max({grid.dims[0], grid.dims[1], grid.dims[2]});
  if (kernels.size > 2 * dmax)
    throw std::invalid_argument("kernel extent exceeds twice the grid size");
}

}  // namespace

ConvResult conv3d_dense(const VoxelGrid& grid, const EncodedKernelSet& kernels,
                        int threads) {
  check_extent(grid, kernels);
  ConvResult res;
  res.dims = grid.dims;
  res.volumes.resize(kernels.count());

  const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];
  const int ke = kernels.size, c = kernels.center;
  parallel_for_chunks(kernels.count(), threads, [&](int64_t kb, int64_t ke_end) {
    for (int64_t n = kb; n < ke_end; ++n) {
      const std::vector<std::int64_t> kern = kernels.dense(static_cast<int>(n));
      auto& vol = res.volumes[n];
      vol.assign(size_t(nx) * ny * nz, 0);
      for (int m = 0; m < nx; ++m) {
        for (int t = 0; t < ny; ++t) {
          for (int p = 0; p < nz; ++p) {
            std::int64_t acc = 0;
            for (int i = 0; i < ke; ++i) {
              const int gi = m + i - c;
              if (gi < 0 || gi >= nx) continue;
              for (int j = 0; j < ke; ++j) {
                const int gj = t + j - c;
                if (gj < 0 || gj >= ny) continue;
                const std::int64_t* krow = &kern[(size_t(i) * ke + j) * ke];
                const uint8_t* vrow =
                    &grid.occupancy[(size_t(gi) * ny + gj) * nz];
                for (int k = 0; k < ke; ++k) {
                  const std::int64_t kv = krow[k];
                  if (kv == 0) continue;
                  const int gk = p + k - c;
                  if (gk < 0 || gk >= nz) continue;
                  acc += kv * vrow[gk];
                }
              }
            }
            vol[res.linear(m, t, p)] = acc;
          }
        }
      }
    }
  });
  return res;
}

ConvResult conv3d_sparse(const VoxelGrid& grid,
                         const EncodedKernelSet& kernels, int threads) {
  check_extent(grid, kernels);
  ConvResult res;
  res.dims = grid.dims;
  res.volumes.resize(kernels.count());

  // Gather the occupied cells once; each kernel then scatters every
  // occupied cell through its (at most cup_count) nonzero offsets.
  std::vector<std::array<int, 3>> occupied;
  for (int i = 0; i < grid.dims[0]; ++i)
    for (int j = 0; j < grid.dims[1]; ++j)
      for (int k = 0; k < grid.dims[2]; ++k)
        if (grid.occupancy[grid.linear(i, j, k)]) occupied.push_back({i, j, k});

  const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];
  parallel_for_chunks(kernels.count(), threads, [&](int64_t kb, int64_t kend) {
    for (int64_t n = kb; n < kend; ++n) {
      auto& vol = res.volumes[n];
      vol.assign(size_t(nx) * ny * nz, 0);
      for (const auto& e : kernels.kernels[n]) {
        // An occupied cell at g contributes K[q] to the output cell
        // g - (q - center).
        const int oi = e.idx[0] - kernels.center;
        const int oj = e.idx[1] - kernels.center;
        const int ok = e.idx[2] - kernels.center;
        for (const auto& [gi, gj, gk] : occupied) {
          const int m = gi - oi, t = gj - oj, p = gk - ok;
          if (m < 0 || m >= nx || t < 0 || t >= ny || p < 0 || p >= nz)
            continue;
          vol[res.linear(m, t, p)] += e.value;
        }
      }
    }
  });
  return res;
}

}  // namespace multicup

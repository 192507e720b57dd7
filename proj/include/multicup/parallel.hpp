#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace multicup {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run fn(begin, end) over [0, n) split into contiguous chunks, one per
/// worker. Chunks are disjoint so workers may write to disjoint output
/// slices without synchronization.
inline void parallel_for_chunks(int64_t n, int threads,
                                const std::function<void(int64_t, int64_t)>& fn) {
  threads = std::min<int64_t>(resolve_threads(threads), std::max<int64_t>(n, 1));
  if (n <= 0) return;
  if (threads <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  int64_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    int64_t b = t * chunk;
    int64_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace multicup

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mcbeam::detail {

/// Worker cap: MCBEAM_WORKERS if set, otherwise hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("MCBEAM_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over a partition of [0, total) on up to worker_count()
/// threads. Chunk boundaries depend only on `total` and the worker count, so
/// callers that reduce per-chunk results in index order stay deterministic.
template <class F>
void parallel_chunks(std::int64_t total, F&& fn) {
  if (total <= 0) return;
  const int workers = std::min<std::int64_t>(worker_count(), total);
  if (workers <= 1) {
    fn(std::int64_t{0}, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::int64_t chunk = (total + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min<std::int64_t>(begin + chunk, total);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mcbeam::detail

#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace alpool {

inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end, worker) over [0, n) split into contiguous chunks, one
// per worker. Workers write to disjoint output slots, so results cannot
// depend on the job count.
inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t, std::size_t, int)>& fn) {
  const int workers = std::min<std::size_t>(static_cast<std::size_t>(resolve_jobs(jobs)),
                                            n == 0 ? 1 : n);
  if (workers <= 1) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  const std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace alpool

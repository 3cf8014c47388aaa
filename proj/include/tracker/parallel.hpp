#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace tracker {

// Runs fn(0..n-1) across up to `jobs` threads. Each index must be
// independent; callers get identical results for any job count.
inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(jobs, n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace tracker

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace actsearch {

// Runs fn(i) for every i in [0, n) across `workers` threads. Work items must
// write only to their own slot, which makes results independent of the
// worker count and of scheduling.
inline void parallel_for(std::int64_t n, int workers,
                         const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    while (true) {
      std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> threads;
  int spawn = workers < static_cast<int>(n) ? workers : static_cast<int>(n);
  threads.reserve(static_cast<std::size_t>(spawn));
  for (int w = 0; w < spawn; ++w) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
}

}  // namespace actsearch

#pragma once
// parallel_for over an index range with a fixed chunk assignment, so results
// are written to caller-owned slots and the outcome never depends on thread
// scheduling.

#include <functional>
#include <thread>
#include <vector>

namespace bimt {

template <typename Fn>
void parallel_for(long n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  int workers = std::min<long>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([w, workers, n, &fn]() {
      for (long i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace bimt

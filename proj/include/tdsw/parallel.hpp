#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace tdsw {

inline int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Evaluates fn(i) for i in [0, n) on up to `jobs` threads. Results are stored
// by index, so the output order never depends on scheduling. The exception of
// the lowest failing index is rethrown after all workers finish.
template <class T, class F>
std::vector<T> parallel_map(int n, int jobs, F fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> err(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  const int nthreads = std::clamp(jobs, 1, std::max(1, n));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace tdsw

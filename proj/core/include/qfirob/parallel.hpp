#pragma once

// Deterministic parallel map: results are stored by index, so any fold over
// the returned vector is independent of scheduling and worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qfirob {

// QFIROB_THREADS if set to a positive integer, else the hardware concurrency.
std::size_t worker_count();

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f, std::size_t workers = 0) {
  if (workers == 0) workers = worker_count();
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<T> out(n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;
  auto body = [&] {
    while (true) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + kChunk);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          out[i] = f(i);
        } catch (...) {
          // Keep the lowest failing index so the rethrown error is stable.
          std::lock_guard lock(error_mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
          return;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace qfirob

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace meyers {

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads.
/// Each index must write only its own output slot; results are then
/// independent of scheduling. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise (tree) sum; the grouping depends only on the length.
template <class T>
T tree_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T s = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) s += values[i];
    return s;
  }
  const std::size_t half = values.size() / 2;
  return tree_sum(values.subspan(0, half)) + tree_sum(values.subspan(half));
}

template <class T>
T tree_sum(const std::vector<T>& values) {
  return tree_sum(std::span<const T>(values));
}

}  // namespace meyers

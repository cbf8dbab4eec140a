#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "pbih/geometry.hpp"

namespace pbih {

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 2;
};

/// Tensor-product sample grid on a chart. Each axis is shrunk by
/// `margin` times its width on both ends before sampling, so chart
/// degeneracies sitting on the boundary are never hit.
struct Grid {
  std::vector<GridAxis> axes;
  double margin = 1e-3;

  /// Throws ConfigError unless every count ≥ 2 and min < max.
  void validate() const;
  std::size_t size() const;
  /// Row-major: the last axis varies fastest.
  std::vector<Eigen::VectorXd> points() const;
  /// The same grid with every count multiplied by `factor`.
  Grid refined(int factor) const;
};

/// A grid over the immersion's chart domain with `count` points per axis.
Grid grid_over_domain(const Immersion& imm, int count, double margin = 1e-3);

inline int default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Output must be
/// written to per-index slots; the first exception thrown is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t threads = std::min<std::size_t>(std::max(1, workers), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pbih

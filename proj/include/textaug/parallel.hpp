#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace textaug {

template <typename R>
struct MapOutcome {
  /// Slot i holds fn(i) when that call completed.
  std::vector<std::optional<R>> results;
  /// Exception from the lowest failing index, if any; later tasks are not
  /// started once a failure is seen.
  std::exception_ptr error;
  std::size_t failed_index = 0;
};

/// Runs fn(0..n-1) on up to `workers` threads. Results are stored by index,
/// so the outcome does not depend on scheduling.
template <typename R, typename Fn>
MapOutcome<R> bounded_parallel_map(std::size_t n, std::size_t workers, Fn&& fn) {
  MapOutcome<R> outcome;
  outcome.results.resize(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        outcome.results[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!outcome.error || i < outcome.failed_index) {
          outcome.error = std::current_exception();
          outcome.failed_index = i;
        }
        stop.store(true);
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return outcome;
}

}  // namespace textaug

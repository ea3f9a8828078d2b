#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace near_misses {

/// Runs body(i) for every i in `order`, handing items out to at most
/// `threads` workers in the given order. The first exception is rethrown.
template <typename Body>
void parallel_for_each_index(const std::vector<std::int64_t>& order, int threads, Body&& body) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(order.size())));
  if (workers <= 1) {
    for (std::int64_t i : order) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1, std::memory_order_relaxed);
      if (slot >= order.size()) return;
      try {
        body(order[slot]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(order.size());
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace near_misses

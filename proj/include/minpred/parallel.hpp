#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace minpred {

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, count) on a transient pool. Each job owns its
// output slot; the first exception is rethrown after the pool drains.
inline void parallel_for(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t)>& fn) {
  threads = std::min(resolve_threads(threads), count == 0 ? 1 : count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex guard;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(guard);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          break;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace minpred

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cpoly {

/// Number of worker threads to use when the caller passes 0.
inline unsigned default_shards() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs fn(i) for i in [0, count) on up to `shards` threads. Work items are
/// claimed dynamically; callers write results into slot i so the reduction
/// they do afterwards sees the same order for any shard count.
template <class Fn>
void parallel_for(std::size_t count, unsigned shards, Fn&& fn) {
  if (shards == 0) shards = default_shards();
  shards = static_cast<unsigned>(std::min<std::size_t>(shards, std::max<std::size_t>(count, 1)));
  if (shards <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(shards);
    for (unsigned s = 0; s < shards; ++s) {
      workers.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(count);
            return;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cpoly

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace volboot {

/// Runs body(worker, i) for i in [0, count) on up to `threads` workers.
/// Items are handed out in chunks; callers write results by index, so the
/// output never depends on scheduling. The first exception thrown by any
/// item is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body, std::size_t chunk = 1) {
  threads = std::max(1U, threads);
  chunk = std::max<std::size_t>(1, chunk);
  if (threads == 1 || count <= chunk) {
    for (std::size_t i = 0; i < count; ++i) body(0U, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](unsigned id) {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= count) break;
      const std::size_t end = std::min(count, begin + chunk);
      try {
        for (std::size_t i = begin; i < end; ++i) body(id, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::size_t>(threads, (count + chunk - 1) / chunk));
  std::vector<std::jthread> pool;
  pool.reserve(n_workers);
  for (unsigned id = 0; id < n_workers; ++id) pool.emplace_back(worker, id);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

inline unsigned default_thread_count() {
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace volboot

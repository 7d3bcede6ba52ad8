#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace hypk {

/// Number of workers to use when the caller passes 0.
inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs `fn(chunk)` for chunk = 0..count-1 on a pool of threads. Chunks are
/// handed out in increasing order. If `fn` returns true, chunks with a larger
/// index than the stopping one are skipped, but every smaller chunk is still
/// processed, so the set of completed chunks below the first stop is the
/// same for every worker count. Returns the smallest stopping chunk, or
/// `count` when no chunk stopped.
template <class Fn>
std::size_t for_each_chunk(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> stop_at{count};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= count || c > stop_at.load()) return;
      try {
        if (fn(c)) {
          std::size_t cur = stop_at.load();
          while (c < cur && !stop_at.compare_exchange_weak(cur, c)) {
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop_at.store(0);
        return;
      }
    }
  };

  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return stop_at.load();
}

}  // namespace hypk

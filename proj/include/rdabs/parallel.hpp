#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rdabs {

// Runs fn(worker, begin, end) over a contiguous split of [0, count).
// Results must be written to per-index slots (or per-worker accumulators) so
// the outcome does not depend on the worker count.
inline void parallel_chunks(std::int64_t count, int workers,
                            const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
  if (count <= 0) return;
  if (workers < 1) workers = 1;
  if (workers == 1 || count == 1) {
    fn(0, 0, count);
    return;
  }
  const int w = static_cast<int>(std::min<std::int64_t>(workers, count));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(w));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < w; ++t) {
    const std::int64_t begin = count * t / w;
    const std::int64_t end = count * (t + 1) / w;
    threads.emplace_back([&, t, begin, end] {
      try {
        fn(t, begin, end);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rdabs

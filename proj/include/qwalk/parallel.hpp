#pragma once

// Deterministic parallel map: indices are partitioned into contiguous blocks,
// every result is written to its own slot, so outputs are identical for any
// thread count.

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "qwalk/types.hpp"

namespace qwalk {

inline std::atomic<unsigned>& max_threads_storage() {
  static std::atomic<unsigned> v{0};  // 0 = hardware concurrency
  return v;
}

inline void set_max_threads(unsigned n) { max_threads_storage().store(n); }

inline unsigned max_threads() {
  unsigned n = max_threads_storage().load();
  if (n == 0) n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// body(i) for i in [0, n); threads = 0 uses the process-wide cap.
template <class F>
void parallel_for(Index n, F&& body, unsigned threads = 0) {
  if (threads == 0) threads = max_threads();
  if (n <= 0) return;
  const unsigned nt = static_cast<unsigned>(std::min<Index>(threads, n));
  if (nt <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) {
    const Index begin = static_cast<Index>(t) * n / nt;
    const Index end = static_cast<Index>(t + 1) * n / nt;
    pool.emplace_back([&, begin, end] {
      try {
        for (Index i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qwalk

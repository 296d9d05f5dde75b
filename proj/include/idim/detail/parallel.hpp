#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace idim::detail {

inline std::atomic<unsigned>& max_threads_slot() {
  static std::atomic<unsigned> n{0};  // 0 = use hardware_concurrency
  return n;
}

inline void set_max_threads(unsigned n) { max_threads_slot().store(n); }

inline unsigned effective_threads(std::size_t work_items) {
  unsigned n = max_threads_slot().load();
  if (n == 0) n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (work_items < n) n = static_cast<unsigned>(work_items);
  return n == 0 ? 1 : n;
}

/// Runs fn(i) for i in [0, n). Work is claimed through a shared counter, so
/// uneven items balance across threads; outputs must be written to
/// preassigned slots so the result does not depend on the schedule.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned threads = effective_threads(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace idim::detail

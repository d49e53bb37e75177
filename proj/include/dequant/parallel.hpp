#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dequant {

/// Work instrumentation shared by the estimators.
struct WorkCounters {
  std::atomic<std::uint64_t> leaf_queries{0};   // entry queries to the innermost vector
  std::atomic<std::uint64_t> state_samples{0};  // Born-rule draws from a guiding state
  std::atomic<std::uint64_t> chain_samples{0};  // index chains drawn by the power estimator

  void add_leaf_queries(std::uint64_t n) noexcept { leaf_queries.fetch_add(n, std::memory_order_relaxed); }
  void add_state_samples(std::uint64_t n) noexcept { state_samples.fetch_add(n, std::memory_order_relaxed); }
  void add_chain_samples(std::uint64_t n) noexcept { chain_samples.fetch_add(n, std::memory_order_relaxed); }
};

/// How an estimator may spend compute. `counters` is optional.
struct Execution {
  unsigned workers = 1;
  WorkCounters* counters = nullptr;
};

namespace detail {
inline thread_local bool in_parallel_region = false;
}

/// Runs body(i) for i in [0, count). Fans out over `exec.workers` threads at the
/// outermost call only; nested calls run inline.
template <class Body>
void parallel_for(std::size_t count, const Execution& exec, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(exec.workers, count);
  if (workers <= 1 || detail::in_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    detail::in_parallel_region = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
    detail::in_parallel_region = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dequant

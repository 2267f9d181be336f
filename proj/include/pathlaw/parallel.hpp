#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace pathlaw {

inline constexpr const char *kThreadsEnvVar = "PATHLAW_THREADS";

// Explicit value, else $PATHLAW_THREADS, else the hardware concurrency.
inline unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt) {
  if (requested && *requested > 0) {
    return *requested;
  }
  if (const char *env = std::getenv(kThreadsEnvVar)) {
    try {
      const long v = std::stol(env);
      if (v > 0) {
        return static_cast<unsigned>(v);
      }
    } catch (const std::exception &) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, n) over contiguous chunks. Results must be written
// by index, so the outcome does not depend on the thread count.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body &&body) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) {
          body(i);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool) {
    th.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace pathlaw

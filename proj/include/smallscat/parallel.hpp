#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace smallscat {

/// Worker count: SMALLSCAT_WORKERS overrides `requested`; 0 means hardware concurrency.
inline int resolve_workers(int requested) {
  if (const char* env = std::getenv("SMALLSCAT_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n). Every index is computed independently, so results written
/// to slot i do not depend on the worker count. The first exception is rethrown.
template <class Body>
void parallel_for(size_t n, int workers, Body&& body) {
  const size_t w = std::min<size_t>(static_cast<size_t>(std::max(1, workers)), n);
  if (w <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(w - 1);
  for (size_t k = 0; k + 1 < w; ++k) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace smallscat

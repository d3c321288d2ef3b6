#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ict {

/// Worker count resolution: ICT_THREADS overrides any explicit request;
/// 0 (or unset) means all cores.
inline int resolve_threads(int requested = -1) {
  if (const char* env = std::getenv("ICT_THREADS")) requested = std::atoi(env);
  if (requested <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    requested = hw > 0 ? static_cast<int>(hw) : 1;
  }
  return requested;
}

/// Static block partition of [0, n). Each index is processed exactly once and
/// writes only its own outputs, so results are identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, const Fn& fn, int threads = -1) {
  const int nt = std::min<std::size_t>(resolve_threads(threads), n == 0 ? 1 : n);
  if (nt <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const std::size_t chunk = (n + nt - 1) / nt;
  std::exception_ptr error;
  std::mutex error_mtx;
  for (int t = 0; t < nt; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mtx);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ict

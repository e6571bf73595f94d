#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cansys {

/// Worker cap: hardware concurrency clipped by the CANSYS_THREADS env var.
inline unsigned thread_budget() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("CANSYS_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
  }
  return n;
}

/// Static chunking so results are slot-addressed and runs are deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
  const unsigned workers = std::min<std::size_t>(thread_budget(), n ? n : 1);
  if (workers <= 1 || n < 2) {
    if (n) chunk_fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t step = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * step;
    if (lo >= n) break;
    const std::size_t hi = std::min(n, lo + step);
    pool.emplace_back([&chunk_fn, lo, hi] { chunk_fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace cansys

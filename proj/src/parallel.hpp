#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace mvtc::detail {

/// Worker cap: hardware concurrency, further capped by MVTC_THREADS.
inline int max_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  int cap = hw ? static_cast<int>(hw) : 1;
  if (const char* env = std::getenv("MVTC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1 && v < cap) cap = v;
  }
  return cap;
}

/// Runs fn(0..n-1) across worker threads. Each index runs exactly once;
/// callers must write results into index-addressed slots so the outcome
/// is schedule independent. The first exception is rethrown.
template <typename F>
void parallel_for(int n, F&& fn) {
  const int threads = std::min(max_threads(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (int i; (i = next.fetch_add(1)) < n && !failed.load();) fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// splitmix64 step; used to derive independent per-replication seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mvtc::detail

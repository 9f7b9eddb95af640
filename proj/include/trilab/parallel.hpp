#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace trilab {

// Runs fn(i) for i in [0, count).  Each index writes only its own slot, so
// results are identical for any thread count; reductions happen afterwards
// in index order.
template <typename Fn>
void parallel_for(std::int64_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<std::int64_t>(threads, count);
  pool.reserve(n);
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Pairwise (cascade) summation over a vector, fixed order.
inline double pairwise_sum(const std::vector<double>& xs, std::size_t lo, std::size_t hi) {
  const std::size_t n = hi - lo;
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += xs[i];
    return s;
  }
  const std::size_t mid = lo + n / 2;
  return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& xs) {
  return pairwise_sum(xs, 0, xs.size());
}

}  // namespace trilab

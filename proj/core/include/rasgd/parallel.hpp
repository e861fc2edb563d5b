#pragma once

#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace rasgd {

/// Threads used by parallel_for_index.  0 = hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

namespace detail {

template <typename Fn>
void run_blocks(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 1; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    if (lo >= n) break;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  const std::size_t hi0 = std::min(n, chunk);
  for (std::size_t i = 0; i < hi0; ++i) fn(i);
  for (auto& th : pool) th.join();
}

}  // namespace detail

/* Results must be written to per-index slots inside fn; together with
 * pairwise_sum below that makes every reduction independent of the thread
 * count and of scheduling order. */
template <typename Fn>
void parallel_for_index(std::size_t n, Fn&& fn) {
  const unsigned threads = thread_count();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  detail::run_blocks(n, threads, fn);
}

/// Block form for loops that carry per-thread scratch: fn(lo, hi) handles
/// indices [lo, hi) with its own workspace.  Same determinism contract.
template <typename Fn>
void parallel_for_blocks(std::size_t n, Fn&& fn) {
  const unsigned threads = thread_count();
  if (threads <= 1 || n < 2) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 1; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    if (lo >= n) break;
    pool.emplace_back([lo, hi = std::min(n, lo + chunk), &fn] { fn(lo, hi); });
  }
  fn(std::size_t{0}, std::min(n, chunk));
  for (auto& th : pool) th.join();
}

/// Fixed-topology pairwise summation: the result depends only on the
/// contents of `values`, not on how they were produced.
double pairwise_sum(std::span<const double> values);

struct MeanStderr {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

MeanStderr mean_and_stderr(std::span<const double> values);

}  // namespace rasgd

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

// Minimal fork-join helpers. Work is split into fixed-size blocks whose
// boundaries do not depend on the worker count, and reductions combine the
// per-block partials in block order. Results are therefore bit-identical for
// any thread count, which the CLI reproducibility contract relies on.
namespace brth::par {

// Effective worker count: explicit set_threads() wins, then the BRTH_THREADS
// environment variable, then hardware concurrency. 0 means "auto".
int max_threads();
void set_threads(int n);

inline constexpr std::size_t kBlock = 8192;

namespace detail {

template <class Fn>
void run_blocks(std::size_t n_blocks, Fn&& block_fn) {
  const int workers = max_threads();
  if (workers <= 1 || n_blocks <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) block_fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) return;
      block_fn(b);
    }
  };
  const std::size_t spawn =
      std::min<std::size_t>(static_cast<std::size_t>(workers), n_blocks) - 1;
  std::vector<std::thread> pool;
  pool.reserve(spawn);
  for (std::size_t i = 0; i < spawn; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace detail

// fn(begin, end) over [0, n) in fixed blocks; fn must only write disjoint state.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  if (n == 0) return;
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  detail::run_blocks(n_blocks, [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(n, begin + kBlock);
    fn(begin, end);
  });
}

// Deterministic sum of term(i) for i in [0, n): each block is summed in index
// order, block partials are combined in block order on the calling thread.
template <class TermFn>
double blocked_sum(std::size_t n, TermFn&& term) {
  if (n == 0) return 0.0;
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(n_blocks, 0.0);
  detail::run_blocks(n_blocks, [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(n, begin + kBlock);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    partial[b] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Parallel max of term(i) for i in [0, n); max is exactly associative so the
// combine order does not matter. Returns 0 for n == 0.
template <class TermFn>
double blocked_max(std::size_t n, TermFn&& term) {
  if (n == 0) return 0.0;
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(n_blocks, 0.0);
  detail::run_blocks(n_blocks, [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(n, begin + kBlock);
    double m = term(begin);
    for (std::size_t i = begin + 1; i < end; ++i) m = std::max(m, term(i));
    partial[b] = m;
  });
  double total = partial[0];
  for (double p : partial) total = std::max(total, p);
  return total;
}

}  // namespace brth::par

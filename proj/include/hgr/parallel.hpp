#pragma once

#include <thread>
#include <vector>

#include "hgr/tensor.hpp"

namespace hgr {

// Runs fn(i) for i in [0, n) on up to `threads` workers with strided
// assignment. Work units must be independent; results written to per-index
// slots are identical regardless of thread count.
template <typename Fn>
void parallel_for(Index n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<Index>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&fn, w, workers, n] {
      for (Index i = w; i < n; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace hgr

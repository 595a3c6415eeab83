#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dpsp {

// Runs fn(begin, end) over a static contiguous partition of [0, count).
// The partition depends only on (count, threads), never on scheduling, so any
// computation whose chunks write disjoint output is reproducible for every
// thread count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = 1;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count ? count : 1));
  if (threads <= 1 || count == 0) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t begin = std::min(count, static_cast<std::size_t>(t) * chunk);
    std::size_t end = std::min(count, begin + chunk);
    if (begin == end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace dpsp

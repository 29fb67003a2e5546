#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace skewfatou {

inline int default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Splits [0, count) into contiguous chunks, one worker thread per chunk.
// Workers must write to disjoint state only; results are then independent of
// the thread count, which is what keeps the rasters byte-reproducible.
inline void parallel_chunks(int count, int threads,
                            const std::function<void(int, int)>& fn) {
  if (threads <= 0) threads = default_threads();
  if (threads == 1 || count <= 1) {
    fn(0, count);
    return;
  }
  if (threads > count) threads = count;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  int per = count / threads;
  int extra = count % threads;
  int begin = 0;
  for (int t = 0; t < threads; ++t) {
    int len = per + (t < extra ? 1 : 0);
    int end = begin + len;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    begin = end;
  }
  for (auto& th : pool) th.join();
}

}  // namespace skewfatou

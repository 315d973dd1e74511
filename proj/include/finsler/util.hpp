#pragma once

#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace finsler {

// %.12e rendering used by every human/machine-facing report.
inline std::string fmt_e(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

// Shortest exact round-trip rendering, for interchange files.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Runs fn(i) for i in [0, count). Work is split into contiguous index
// chunks, one per thread, so results indexed by i are deterministic.
// The lowest-index exception wins when several workers throw.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t nthreads = std::min<std::size_t>(threads, count);
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t begin = count * t / nthreads;
    const std::size_t end = count * (t + 1) / nthreads;
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace finsler

#include "hocurve/common.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hocurve {

int thread_count() {
  if (const char* env = std::getenv("HOCURVE_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  constexpr std::size_t kChunk = kParallelChunk;  // chunking must not depend on worker count
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  const int workers = std::min<std::size_t>(thread_count(), nchunks);
  if (workers <= 1) {
    // keep the exact chunk structure so per-chunk reductions round identically
    for (std::size_t c = 0; c < nchunks; ++c) {
      std::size_t b = c * kChunk;
      body(b, std::min(b + kChunk, n));
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&]() {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= nchunks) break;
      std::size_t b = c * kChunk;
      body(b, std::min(b + kChunk, n));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace hocurve

#include "slfv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace slfv {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& body) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), n));
  if (workers == 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  // small blocks handed out dynamically keep long replicates from stalling a worker
  const std::int64_t block = std::max<std::int64_t>(1, n / (workers * 64));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    try {
      for (;;) {
        std::int64_t lo = next.fetch_add(block);
        if (lo >= n) return;
        std::int64_t hi = std::min(n, lo + block);
        for (std::int64_t i = lo; i < hi; ++i) body(i);
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace slfv

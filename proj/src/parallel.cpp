#include "gsa/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gsa {

void parallel_for(std::uint64_t count, unsigned workers,
                  const std::function<void(std::uint64_t)>& body) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  const auto n_threads = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
  if (n_threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace gsa

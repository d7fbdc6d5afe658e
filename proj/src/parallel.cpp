#include "d2nn/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace d2nn {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(size_t n, size_t chunk_size, int threads,
                     const std::function<void(size_t, size_t, size_t)>& fn) {
  if (n == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  threads = resolve_threads(threads);
  const size_t workers = std::min<size_t>(static_cast<size_t>(threads), n_chunks);

  if (workers <= 1) {
    for (size_t k = 0; k < n_chunks; ++k)
      fn(k, k * chunk_size, std::min(n, (k + 1) * chunk_size));
    return;
  }

  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      size_t k = next.fetch_add(1);
      if (k >= n_chunks) return;
      try {
        fn(k, k * chunk_size, std::min(n, (k + 1) * chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace d2nn

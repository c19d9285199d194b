// threads.cpp -- see threads.hpp for the determinism contract.

#include "stokes2p/threads.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stokes2p {

int resolve_thread_count(std::optional<int> flag_value, std::optional<int> config_value) {
  const auto clamp = [](int v) { return std::clamp(v, 1, 256); };
  if (flag_value && *flag_value > 0) return clamp(*flag_value);
  if (const char* env = std::getenv("STOKES2P_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return clamp(static_cast<int>(v));
  }
  if (config_value && *config_value > 0) return clamp(*config_value);
  return 1;
}

void parallel_chunks(std::size_t total, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (total == 0) return;
  const std::size_t n_chunks = (total + kChunkSize - 1) / kChunkSize;
  threads = std::clamp<int>(threads, 1, static_cast<int>(std::min<std::size_t>(n_chunks, 256)));

  if (threads == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      const std::size_t b = c * kChunkSize;
      body(c, b, std::min(total, b + kChunkSize));
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      try {
        const std::size_t b = c * kChunkSize;
        body(c, b, std::min(total, b + kChunkSize));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stokes2p

// threads.hpp -- thread-count resolution and a deterministic fork/join
// helper.  Work is split into fixed-size chunks; worker threads pull chunk
// indices from an atomic counter, write results into per-chunk slots, and
// the caller merges slots in index order.  Output is therefore identical
// for any thread count.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

namespace stokes2p {

inline constexpr int kChunkSize = 64;

// Precedence: command-line flag > STOKES2P_THREADS env var > config value > 1.
// Values are clamped to [1, 256]; malformed env values are ignored.
int resolve_thread_count(std::optional<int> flag_value, std::optional<int> config_value);

// Invokes body(chunk_index, begin, end) for every chunk of [0, total) with
// the requested number of threads.  Each chunk index is claimed exactly once;
// bodies for distinct chunks must not touch shared mutable state other than
// their own slot.  Exceptions from workers are rethrown on the caller thread.
void parallel_chunks(std::size_t total, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace stokes2p

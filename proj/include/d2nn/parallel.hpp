#pragma once

#include <cstddef>
#include <functional>

namespace d2nn {

/// Number of worker threads to use: requested if > 0, else hardware concurrency.
int resolve_threads(int requested);

/// Runs fn(chunk_index, begin, end) for every fixed-size chunk of [0, n).
/// Chunk boundaries depend only on n and chunk_size, never on the thread count,
/// so callers that keep one partial result per chunk and reduce them in chunk
/// order get bit-identical results for any thread count (including 1).
void parallel_chunks(size_t n, size_t chunk_size, int threads,
                     const std::function<void(size_t, size_t, size_t)>& fn);

}  // namespace d2nn

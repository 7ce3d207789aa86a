#pragma once

#include <cstddef>
#include <functional>

namespace hypangles {

/// Worker count: HYPANGLES_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Splits [0, n) into `chunks` contiguous ranges and runs body(chunk, begin, end)
/// for each, using up to thread_count() threads. Chunk boundaries depend only on
/// n and chunks, so callers that reduce per-chunk results in chunk order get
/// thread-count-independent output.
void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace hypangles

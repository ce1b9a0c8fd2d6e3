#pragma once

#include <cstddef>
#include <functional>

namespace iskew {

/// Worker count: 0 means one per hardware thread.
unsigned resolve_threads(unsigned requested) noexcept;

/// Reads INDEX_SKEW_THREADS (0 or unset = auto).
unsigned threads_from_environment() noexcept;

/// Splits [0, n) into contiguous chunks and runs body(begin, end) on each chunk,
/// one chunk per worker. Exceptions from workers are rethrown on the caller.
void parallel_chunks(std::size_t n, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace iskew

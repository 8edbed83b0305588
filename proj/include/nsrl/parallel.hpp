#pragma once

#include <cstddef>
#include <functional>

namespace nsrl {

/// Data-parallel width. Resolved once from NSRL_THREADS (default: all cores);
/// can be overridden programmatically (the determinism tests do).
int thread_width();
void set_thread_width(int width);

/// Runs fn(i) for i in [0, n) on up to thread_width() threads.
/// Callers must only write to disjoint locations per index; reductions go
/// through pairwise_sum so outputs never depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Chunked variant: fn(begin, end) over disjoint ranges.
void parallel_for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace nsrl

#pragma once

#include <cstddef>

#include <functional>

namespace oobgini {

// Number of worker threads: `requested` if > 0, otherwise the OOBGINI_THREADS
// environment variable, otherwise hardware concurrency.
int resolve_thread_count(int requested);

// Runs fn(i) for i in [0, n). Work items must be independent; callers that
// accumulate results must write into pre-sized per-item slots and reduce
// sequentially afterwards so results do not depend on the thread count.
// The first exception thrown by any item is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace oobgini

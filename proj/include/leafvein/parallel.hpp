#pragma once

#include <cstddef>
#include <functional>

namespace leafvein {

/// Number of worker threads to use: the LEAFVEIN_THREADS environment
/// variable when set (clamped to >= 1), otherwise hardware concurrency.
int effective_thread_count();

/// Runs fn(0..count-1) across worker threads with a static index split.
/// Callers write results into preallocated slots, so the outcome does not
/// depend on the thread count. The first exception thrown by any worker is
/// rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace leafvein

#pragma once

#include <cstddef>
#include <functional>

namespace gibbstf {

/// Worker count: GIBBSTF_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs f(i) for i in [0, n) on up to `threads` workers. Work is handed out by
/// index, so results written to slot i do not depend on the thread count. The
/// first exception thrown by any f(i) is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);

}  // namespace gibbstf

#pragma once

#include <cstddef>
#include <functional>

namespace qcap {

/// Worker cap: QCAP_THREADS if set to a positive integer, else the hardware concurrency.
unsigned default_thread_count();

/// Run body(i) for i in [0, n) on up to `threads` workers with static chunking.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace qcap

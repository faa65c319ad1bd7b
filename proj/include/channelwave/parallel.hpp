#pragma once

#include <cstddef>
#include <functional>

namespace channelwave {

// Worker count: CHANNELWAVE_THREADS if set and positive, else hardware concurrency.
std::size_t default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default). The first
// exception thrown by any task is rethrown after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t threads = 0);

}  // namespace channelwave

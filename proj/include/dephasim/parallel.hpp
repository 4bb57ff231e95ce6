// parallel.hpp: static-partition worker pool with deterministic per-index results

#pragma once

#include <cstddef>
#include <functional>

namespace dephasim {

// Worker count used by library loops. Defaults to DEPHASIM_THREADS when set,
// otherwise std::thread::hardware_concurrency().
std::size_t thread_count();
void set_thread_count(std::size_t n);  // 0 restores the default

// Calls body(i) for i in [0, n). Each index is handled by exactly one worker and
// must only write to its own output slot, so results never depend on the
// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace dephasim

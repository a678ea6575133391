#pragma once

#include <cstddef>
#include <functional>

namespace nnmc {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// count). Work items are handed out through an atomic counter; callers own
/// result placement, so outputs never depend on the schedule. The first
/// exception thrown by a work item is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

unsigned default_thread_count();

}  // namespace nnmc

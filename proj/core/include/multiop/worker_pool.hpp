#pragma once

#include <functional>

namespace multiop {

/// Runs fn(0) .. fn(count - 1) across at most `threads` workers. Results must
/// be written into per-index slots by the caller; indices are handed out
/// atomically, so output never depends on scheduling. threads <= 1 runs
/// inline. The first exception thrown by any job is rethrown after all
/// workers drain.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

} // namespace multiop

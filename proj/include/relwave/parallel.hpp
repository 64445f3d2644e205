#pragma once

#include <functional>

namespace relwave {

/// Worker count: RELWAVE_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads, in
/// contiguous chunks. The first exception thrown by any worker is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace relwave

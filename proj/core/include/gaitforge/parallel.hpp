#pragma once

#include <functional>

namespace gaitforge {

// Number of worker threads used for Jacobian columns. 0 selects the hardware
// concurrency.
void set_worker_threads(int threads);
int worker_threads();

// Runs body(i) for i in [0, n). The first exception thrown by any task is
// rethrown on the calling thread after all workers join.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace gaitforge

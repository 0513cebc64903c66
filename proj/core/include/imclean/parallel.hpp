#pragma once

#include <cstddef>
#include <functional>

namespace imclean {

/// Process-wide cap on worker threads used by parallel loops. 1 = serial.
void set_worker_threads(int n);
int worker_threads();

/// Runs fn(i) for i in [0, n). Work items must write disjoint outputs;
/// results are independent of the thread count by construction.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace imclean

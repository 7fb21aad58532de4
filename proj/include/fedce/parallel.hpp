#pragma once

#include <cstddef>
#include <functional>

namespace fedce {

// Parallelism cap: FEDCE_THREADS if set (min 1), else hardware concurrency.
int max_threads();

// Runs fn(0..n-1), possibly across threads. Bodies must write only to their
// own slot so results are independent of scheduling. The first exception
// thrown by any body is rethrown after all workers join.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace fedce

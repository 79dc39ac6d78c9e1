#pragma once

#include <functional>

namespace framefem {

/// Worker count for embarrassingly parallel experiment loops: the hardware
/// concurrency capped by the FRAMEFEM_THREADS environment variable and by
/// the job count.  Always at least 1.
int worker_count(int njobs);

/// Runs fn(0..n-1) on worker_count(n) threads.  Callers own determinism by
/// writing to per-index slots; exceptions are rethrown on the caller thread.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace framefem

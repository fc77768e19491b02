#pragma once

#include <functional>

namespace qgraph {

/// Worker count: the THREADS environment variable when set (clamped to at
/// least 1), hardware concurrency otherwise.
int thread_count();

/// Run fn(i) for i in [0, n) across thread_count() workers. The first
/// exception thrown by any worker is rethrown after all workers join.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace qgraph

#pragma once

#include <functional>

namespace dirlab {

/// `requested` if positive, else $DIRLAB_THREADS if set and positive, else 1.
int ResolveThreadCount(int requested);

/// Calls body(i) for i in [0, count) on `threads` workers. Each index runs
/// exactly once; the first exception thrown is rethrown after all workers join.
void ParallelFor(int count, int threads, const std::function<void(int)>& body);

}  // namespace dirlab

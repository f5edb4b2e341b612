#pragma once

#include <cstddef>
#include <functional>

namespace lse {

/// Worker count for n independent tasks: LSE_THREADS if set to a positive
/// integer, otherwise hardware concurrency; never more than n.
std::size_t worker_count(std::size_t n);

/// Runs fn(0..n-1) on up to worker_count(n) threads. If tasks throw, the
/// exception of the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lse

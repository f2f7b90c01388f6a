#pragma once

#include <cstddef>
#include <functional>

namespace qmem {

/// Runs fn(0) ... fn(n-1) on up to `jobs` threads (serially for jobs <= 1).
/// Iterations must be independent; results should be written to
/// pre-allocated, index-keyed storage so the output does not depend on
/// scheduling order. The first exception thrown by any iteration is
/// rethrown on the calling thread.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace qmem

#pragma once

#include <cstddef>
#include <functional>

namespace spreadcast {

/// Runs body(i) for i in [0, count). Work is spread over hardware threads;
/// calls nested inside a running parallel_for execute serially. Callers
/// write results into pre-sized slots indexed by i, so output order never
/// depends on scheduling. The first exception thrown by any body is
/// rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Overrides the worker count (0 restores the hardware default).
void set_max_threads(std::size_t threads);

}  // namespace spreadcast

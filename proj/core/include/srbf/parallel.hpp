#pragma once

#include <cstddef>
#include <functional>

namespace srbf {

/// Worker count for data-parallel loops: SRBF_THREADS if set, otherwise the
/// hardware concurrency. Results never depend on this value because work is
/// split into fixed-size chunks that are reduced in index order.
std::size_t thread_count();

/// Overrides the worker count for the rest of the process (0 restores the default).
void set_thread_count(std::size_t count);

/// Runs body(t) for t in [0, tasks). Tasks are independent.
void parallel_for(std::size_t tasks, const std::function<void(std::size_t)>& body);

}  // namespace srbf

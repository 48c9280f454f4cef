#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace prelog {

/// Worker count: PRELOG_LAB_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(i) for i in [0, count). Results must be written by index; the
/// first exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = default_thread_count());

}  // namespace prelog

#pragma once

#include <cstddef>
#include <functional>

namespace bezsimplex {

/// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
/// The first exception thrown by body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bezsimplex

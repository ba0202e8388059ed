#pragma once

#include <cstddef>
#include <functional>

namespace segmeld {

/// Worker count: SEGMELD_THREADS when set (>= 1), else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Callers write into per-index slots so the
/// result never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace segmeld

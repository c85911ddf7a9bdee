#pragma once

#include <cstddef>
#include <functional>

namespace nullmanifold {

// Process-wide worker count for data-parallel loops. 0 = hardware concurrency.
void set_thread_count(int threads);
int thread_count();

// Runs fn(begin, end) over a static partition of [0, n). Partitions are
// disjoint, so writes to per-index slots stay deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace nullmanifold

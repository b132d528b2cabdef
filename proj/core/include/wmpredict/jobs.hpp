#pragma once

#include <cstddef>
#include <functional>

namespace wmp {

// Runs fn(0..n-1) on up to `workers` threads. Jobs share no mutable state;
// results must be written to disjoint, preallocated slots. The first
// exception thrown by any job is rethrown after all threads join.
void run_jobs(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace wmp

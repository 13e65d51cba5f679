#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <vector>

namespace sobolev {

// Worker cap: SOBOLEV_LAB_THREADS if set (>= 1), else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, count). Tasks are handed out in index order; each task
// must write only to its own output slot, so results never depend on the worker count.
// The first exception (lowest task index) is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Pairwise (cascade) summation in a fixed order.
double pairwise_sum(std::span<const double> values);

}  // namespace sobolev

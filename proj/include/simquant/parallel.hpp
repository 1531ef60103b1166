#pragma once

#include <cstddef>
#include <functional>

namespace simquant {

// Worker count: SIMQUANT_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Runs body(i) for i in [0, n) over contiguous static chunks. Callers write
// results into per-index slots and reduce afterwards, so output never depends
// on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace simquant

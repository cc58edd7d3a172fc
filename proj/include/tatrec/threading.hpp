#pragma once

#include <cstddef>
#include <functional>

namespace tatrec {

// Number of worker threads used by parallel_for. Defaults to the value of
// the TATREC_THREADS environment variable, or 1 when unset. Results are
// bitwise independent of the thread count: work items write disjoint
// outputs and no cross-item reductions are performed in parallel sections.
void set_num_threads(int n);
int num_threads();

/// Runs fn(i) for i in [0, n) with a static contiguous partition.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tatrec

#pragma once

#include <cstddef>
#include <functional>

namespace gmk {

// Worker count used by the library; 0 means hardware concurrency.
void set_num_threads(int n);
int num_threads();

// Calls body(begin, end) over contiguous chunks of [0, count). Chunk boundaries depend
// only on count and the thread setting, so per-index results are order independent.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 64);

}  // namespace gmk

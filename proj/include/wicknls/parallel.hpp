#pragma once

#include <cstddef>
#include <functional>

namespace wicknls {

// Global worker cap (CLI --threads). 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

// Runs body(i) for i in [0, n). Work is chunked across threads; every i writes
// only to its own slots, so results are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Chunked variant: body(begin, end) per contiguous range, for per-thread scratch.
void parallel_for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace wicknls

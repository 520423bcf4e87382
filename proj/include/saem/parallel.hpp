#pragma once

#include <functional>

namespace saem {

/// Worker threads used for face reductions. Initialized from the SAEM_THREADS
/// environment variable (default 1).
int reduction_threads();
void set_reduction_threads(int threads);

/// Calls fn(chunk_index, begin, end) over [0, count) split into chunks of
/// `chunk_size`. Chunk boundaries do not depend on the thread count, so callers
/// that combine per-chunk partials in chunk order get bitwise-identical results
/// for any number of threads.
void for_each_chunk(int count, int chunk_size, const std::function<void(int, int, int)>& fn);

inline int num_chunks(int count, int chunk_size) { return (count + chunk_size - 1) / chunk_size; }

}  // namespace saem

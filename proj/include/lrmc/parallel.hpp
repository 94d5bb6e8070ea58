#ifndef LRMC_PARALLEL_HPP
#define LRMC_PARALLEL_HPP

#include <functional>

#include "lrmc/common.hpp"

namespace lrmc {

// Splits [0, count) into `threads` contiguous chunks and runs
// fn(chunk, begin, end) for each, chunk 0 on the calling thread. Chunk
// boundaries depend only on (count, threads). The first exception thrown by
// any chunk is rethrown after all workers join.
void parallel_chunks(Index count, int threads,
                     const std::function<void(int, Index, Index)>& fn);

}  // namespace lrmc

#endif  // LRMC_PARALLEL_HPP

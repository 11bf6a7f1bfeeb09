#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace tricorr {

// Process-wide cap on worker threads; 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs body(i) for i in [0, count) on up to max_threads() workers. Each index
// runs exactly once; callers write results into per-index slots and reduce
// them in index order afterwards, so results do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Splits [begin, end) into contiguous blocks of at most block_size indices.
struct Block {
  std::size_t begin;
  std::size_t end;
};
std::vector<Block> make_blocks(std::size_t begin, std::size_t end, std::size_t block_size);

}  // namespace tricorr

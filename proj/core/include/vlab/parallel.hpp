#pragma once

#include <cstddef>
#include <functional>

namespace vlab {

/// Worker count used by parallel_for. Defaults to the hardware concurrency.
void set_num_threads(unsigned n);
unsigned num_threads();

/// Runs body(begin, end) over a static partition of [0, n) into contiguous chunks.
/// Callers must write results by index; the partition never affects values.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace vlab

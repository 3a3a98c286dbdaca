#pragma once

#include <cstdint>
#include <functional>

namespace slfv {

// Runs body(i) for i in [0, n) on `threads` workers (0 = hardware count).
// Work is split into contiguous blocks; callers write results by index so
// the outcome does not depend on the worker count.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& body);

int resolve_threads(int threads);

}  // namespace slfv

#pragma once

#include <cstddef>
#include <functional>

namespace fouk {

/// Thread budget: FOUK_THREADS when set (>= 1), else hardware concurrency.
int thread_budget();

/// Runs fn(i) for i in [0, count) across the thread budget with a static
/// partition. Each index must write only its own output slot, which keeps
/// results identical for any thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace fouk

#pragma once

#include <cstddef>
#include <functional>

namespace rmsgof {

// requested > 0 wins; otherwise RMSGOF_THREADS, then hardware concurrency.
std::size_t resolve_thread_count(std::size_t requested = 0);

// Calls body(i) for every i in [0, count) on up to `threads` workers. Each
// worker takes a contiguous block of indices, so body must only write to
// slots owned by its index. Exceptions from body are rethrown on the caller.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace rmsgof

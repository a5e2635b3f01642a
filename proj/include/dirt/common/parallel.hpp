#pragma once

#include <cstddef>
#include <functional>

namespace dirt {

/// Runs body(begin, end) over a static partition of [0, n) on up to `workers` threads.
/// Partition boundaries depend only on (n, workers), so results written to
/// index-addressed slots are identical for any scheduling. Exceptions from a
/// worker are rethrown on the calling thread (the first by chunk order).
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace dirt

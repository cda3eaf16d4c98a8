#pragma once

#include <cstddef>
#include <functional>

namespace tcov {

// Runs body(i) for i in [0, count) across up to `workers` threads.  Each index
// is processed exactly once and writes only its own slot, so results are
// byte-identical for any worker count -- the caller keeps determinism by
// deriving per-index RNG streams and reducing over slots in index order.
// Exceptions from the body are rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace tcov

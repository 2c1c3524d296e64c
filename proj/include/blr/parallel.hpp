// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace blr {

/// Worker count: `requested` if nonzero, else BLR_THREADS from the
/// environment, else the hardware concurrency (at least 1).
std::size_t resolve_threads(std::size_t requested);

/// Calls fn(i) for i in [0, jobs) on up to `threads` workers pulling from a
/// shared counter. The first exception thrown by any job is rethrown after
/// all workers have joined.
void parallel_for(std::size_t jobs, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace blr

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace weylsampl {

/// Global worker-thread cap for parallel_for. 0 = hardware concurrency.
void set_thread_limit(int threads);
int thread_limit();

/// Runs fn(i) for i in [0, n). Work is split into contiguous index ranges,
/// one per worker; with a single worker it degrades to a plain loop. Results
/// must be written to disjoint slots so the outcome is schedule-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace weylsampl

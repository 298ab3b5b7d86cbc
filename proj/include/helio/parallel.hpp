// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace helio {

// Worker cap from HELIO_THREADS (unset or 0 = hardware concurrency).
std::size_t thread_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once; results must
// only depend on i, so the output is identical for any worker count. The first
// exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace helio

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace mocha {

/// Worker count used by parallel_for. Defaults to 1.
void set_num_threads(std::size_t n);
std::size_t num_threads();

/// Runs fn(i) for i in [0, n) across num_threads() workers in contiguous
/// chunks. Each index must write only to its own output slots; results are
/// then independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mocha

#pragma once

#include <cstddef>
#include <functional>

namespace pitslab {

/// Worker count used by grid and per-row loops; 0 selects hardware parallelism.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index is processed by exactly one worker,
/// so results written per index do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pitslab

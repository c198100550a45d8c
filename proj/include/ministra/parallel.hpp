#pragma once

#include <cstddef>
#include <functional>

namespace ministra {

/// Worker cap used by every parallel phase (parse, delay, propagation). 0 = hardware default.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Each index is touched exactly once; callers write disjoint slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Same, over [begin, end) chunks, for loops whose per-index work is tiny.
void parallel_for_ranges(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ministra

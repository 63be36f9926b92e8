#pragma once

#include <cstddef>
#include <functional>

#include "stokesrbf/bigfloat.hpp"

namespace stokesrbf {

/// Number of worker threads (hardware concurrency, overridable through the
/// STOKESRBF_THREADS environment variable).
int worker_threads();

/// Static block partition of [0, n) over the worker threads. Each worker runs
/// with the given thread-local BigFloat precision. fn must be safe to call
/// concurrently for distinct indices.
void parallel_for(std::size_t n, int digits, const std::function<void(std::size_t)>& fn);

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_for(n, BigFloat::default_digits(), fn);
}

}  // namespace stokesrbf

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace modclust {

/// Worker cap from MODCLUST_THREADS, else the available parallelism.
unsigned worker_count();

/// Runs fn(0) ... fn(n - 1) on up to `threads` workers (0 = worker_count()).
/// If any call throws, the exception of the lowest failing index is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// SplitMix64 finaliser applied to a combination of two words.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace modclust

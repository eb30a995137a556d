#pragma once

#include <cstdint>
#include <functional>

namespace gsa {

/// Runs body(i) for i in [0, count) on up to `workers` threads. Indices are
/// handed out dynamically; the first exception thrown is rethrown after all
/// threads have joined. workers == 0 means hardware concurrency.
void parallel_for(std::uint64_t count, unsigned workers,
                  const std::function<void(std::uint64_t)>& body);

}  // namespace gsa

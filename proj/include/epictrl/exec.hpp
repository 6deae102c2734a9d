#pragma once

#include <cstdint>

namespace epictrl {

/// Execution policy for the data-parallel kernels. Every kernel has a plain
/// serial path (the reference implementation) and an OpenMP path; the two
/// must agree, which tests/bench verify.
enum class Exec {
    seq,
    par,
};

/// Below this node count the per-step kernels run serially even under
/// Exec::par: an OpenMP region entry costs tens of microseconds, more than
/// an entire small-instance RK4 stage.
inline constexpr std::int32_t kParallelNodeThreshold = 4096;

} // namespace epictrl

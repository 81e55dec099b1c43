#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dichotomy {

/// Sweep kernels run either serially (reference implementation, kept for
/// testing) or OpenMP-parallel. Both paths write per-item slots and reduce
/// serially afterwards, so reports are identical bit for bit.
enum class ExecutionMode { Serial, Parallel };

inline ExecutionMode default_execution_mode() {
#ifdef _OPENMP
    return ExecutionMode::Parallel;
#else
    return ExecutionMode::Serial;
#endif
}

inline bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs fn(i) for i in [0, count). Items must be independent.
template <typename Fn>
void for_each_index(long long count, ExecutionMode mode, Fn&& fn) {
    if (mode == ExecutionMode::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < count; ++i) fn(i);
        return;
#endif
    }
    for (long long i = 0; i < count; ++i) fn(i);
}

}  // namespace dichotomy

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hslab::parallel {

/// Execution policy for batch kernels. The serial path is the reference
/// implementation; the OpenMP path must produce identical results because
/// work items never share floating-point reductions.
enum class Policy { serial, openmp };

inline Policy& default_policy() {
    static Policy p = Policy::openmp;
    return p;
}

inline void set_max_threads(int k) {
#ifdef _OPENMP
    if (k > 0) omp_set_num_threads(k);
#else
    (void)k;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs f(i) for i in [0, n). Items must be independent; each item writes
/// only its own output slot, so results do not depend on the schedule.
/// Exceptions cannot unwind through an OpenMP region, so the first one is
/// captured and rethrown after the loop.
template <class F>
void for_index(std::size_t n, F&& f, Policy pol) {
    if (pol == Policy::openmp) {
#ifdef _OPENMP
        std::exception_ptr first;
        std::mutex mu;
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                f(static_cast<std::size_t>(i));
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!first) first = std::current_exception();
            }
        }
        if (first) std::rethrow_exception(first);
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) f(i);
}

template <class F>
void for_index(std::size_t n, F&& f) {
    for_index(n, static_cast<F&&>(f), default_policy());
}

} // namespace hslab::parallel

#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nbweight {

inline int resolve_jobs(int jobs) {
#ifdef _OPENMP
    if (jobs <= 0) return omp_get_max_threads();
    return jobs;
#else
    (void)jobs;
    return 1;
#endif
}

// Runs f(i) for i in [0, n). Each call must write only to its own slot so the
// result is identical no matter how many threads run. Exceptions thrown by f
// are captured and rethrown on the calling thread (throwing out of an OpenMP
// region would terminate).
template <typename F>
void parallel_for(std::int64_t n, int jobs, F&& f) {
    const int threads = resolve_jobs(jobs);
    if (threads <= 1 || n <= 1) {
        for (std::int64_t i = 0; i < n; ++i) f(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr error;
    std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            f(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
#else
    for (std::int64_t i = 0; i < n; ++i) f(i);
#endif
}

}  // namespace nbweight

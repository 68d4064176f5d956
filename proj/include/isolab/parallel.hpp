#ifndef ISOLAB_PARALLEL_HPP
#define ISOLAB_PARALLEL_HPP

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace isolab {

// Applies the ISOLAB_THREADS cap, if set. Call once at program start.
inline void apply_thread_cap() {
#ifdef _OPENMP
    if (const char* env = std::getenv("ISOLAB_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace isolab

#endif

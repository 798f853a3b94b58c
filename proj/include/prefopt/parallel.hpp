#pragma once
#include <cstdlib>
#include <string>

#include <omp.h>

namespace prefopt {

// worker cap: PREFOPT_THREADS env var, default all available cores.
// Read per call so tests can vary the cap within one process.
inline int thread_count() {
    const char* env = std::getenv("PREFOPT_THREADS");
    int hw = omp_get_max_threads();
    if (env == nullptr) return hw;
    int v = std::atoi(env);
    if (v < 1) return 1;
    return v < hw ? v : hw;
}

} // namespace prefopt

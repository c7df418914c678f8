#include "essograph/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef ESSOGRAPH_HAVE_OPENMP
#include <omp.h>
#endif

namespace essograph {

namespace {
std::size_t g_override = 0;
}

void set_thread_count(std::size_t n) { g_override = n; }

std::size_t thread_count() {
#ifdef ESSOGRAPH_HAVE_OPENMP
    if (g_override > 0) return g_override;
    if (const char* env = std::getenv("ESSOGRAPH_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
            // fall through to the runtime default on a malformed value
        }
    }
    return static_cast<std::size_t>(omp_get_max_threads());
#else
    (void)g_override;
    return 1;
#endif
}

} // namespace essograph

#include "mgt/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mgt {

int default_threads() {
#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    if (const char* cap = std::getenv("MGT_THREADS")) {
        try {
            const int value = std::stoi(cap);
            if (value > 0) {
                threads = std::min(threads, value);
            }
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return std::max(threads, 1);
}

} // namespace mgt

#include "magring/exec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace magring {

int thread_count(Exec mode) {
#ifdef _OPENMP
    return mode == Exec::parallel ? omp_get_max_threads() : 1;
#else
    (void)mode;
    return 1;
#endif
}

void set_thread_cap(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace magring

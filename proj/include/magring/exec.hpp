#pragma once

#include <atomic>
#include <exception>

namespace magring {

// Execution policy for the heavy kernels. `serial` is the reference path
// used to pin down determinism; `parallel` uses OpenMP when compiled in.
// Both fill preallocated buffers in index order and reduce serially, so
// results are identical regardless of the schedule.
enum class Exec { serial, parallel };

// Number of worker threads a parallel region will use (1 for serial or
// when OpenMP is unavailable).
int thread_count(Exec mode);

// Caps OpenMP's thread pool; ignored without OpenMP. 0 keeps the default.
void set_thread_cap(int n);

// Runs body(0..n-1), in parallel when asked for and OpenMP is compiled into
// the calling translation unit. The first exception wins and is rethrown on
// the calling thread; remaining iterations are skipped best-effort.
template <class F>
void for_each_index(Exec mode, int n, F&& body) {
#ifdef _OPENMP
    if (mode == Exec::parallel && n > 1) {
        std::exception_ptr err;
        std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                body(i);
            } catch (...) {
#pragma omp critical(magring_for_each_index)
                {
                    if (!failed.exchange(true)) err = std::current_exception();
                }
            }
        }
        if (err) std::rethrow_exception(err);
        return;
    }
#else
    (void)mode;
#endif
    for (int i = 0; i < n; ++i) body(i);
}

} // namespace magring

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace ttsv {

// Runs body(i) for i in [0, n). threads == 1 is a plain serial loop; other
// values use OpenMP (0 keeps the runtime default). Each index must write only
// its own output slot, which keeps results independent of the thread count.
// The first exception thrown by any body is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex m;
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(m);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace ttsv

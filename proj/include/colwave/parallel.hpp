#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace colwave {

/// Thread count: explicit request, else COLWAVE_THREADS, else hardware concurrency.
int resolve_threads(int requested);

/// Evaluates f(0..n-1) on up to `threads` workers; results are stored by index,
/// so the merged output does not depend on scheduling. The exception of the
/// lowest failing index is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, int threads, F&& f) {
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t nt = std::min<std::size_t>(std::max(1, threads), n);
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < nt; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace colwave

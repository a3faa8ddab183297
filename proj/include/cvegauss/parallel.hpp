#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cvegauss {

inline std::size_t default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Splits [0, count) into contiguous chunks, one per worker. `make_state` builds
/// per-worker state (scratch buffers, plans); `body(state, index)` must only
/// write results addressed by index, which makes the outcome independent of
/// the worker count. The first exception thrown by any worker is rethrown.
template <typename MakeState, typename Body>
void parallel_for(std::size_t count, std::size_t workers, MakeState make_state, Body body) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        auto state = make_state();
        for (std::size_t i = 0; i < count; ++i) body(state, i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        pool.emplace_back([&, begin, end] {
            try {
                auto state = make_state();
                for (std::size_t i = begin; i < end; ++i) body(state, i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace cvegauss

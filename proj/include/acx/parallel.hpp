#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace acx {

/// Worker count: ACX_THREADS if set (>= 1), otherwise hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("ACX_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) over contiguous chunks. Each index must write only its own
/// output slot; reductions are left to the caller so results do not depend on the worker count.
template <class Body>
void parallel_for(std::int64_t count, Body&& body) {
    const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), std::max<std::int64_t>(1, count / 256)));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const std::int64_t chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(count, lo + chunk);
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::int64_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace acx

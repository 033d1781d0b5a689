#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace thetalab {

namespace detail {
inline thread_local bool inside_parallel_for = false;
} // namespace detail

/// Number of worker threads the library may use.
///
/// Reads THETA_LAB_THREADS when set to a positive integer, otherwise uses
/// std::thread::hardware_concurrency(). Never returns 0.
inline unsigned thread_cap()
{
    if (const char* env = std::getenv("THETA_LAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Calls body(i) for i in [0, n), split into contiguous chunks over at most
/// thread_cap() threads. Each index must write only its own output so that
/// results do not depend on the thread count. The first exception thrown by
/// any chunk is rethrown on the calling thread. Nested calls run serially.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 16)
{
    const std::size_t workers = std::min<std::size_t>(
        thread_cap(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk)));
    if (workers <= 1 || detail::inside_parallel_for) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            detail::inside_parallel_for = true;
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace thetalab

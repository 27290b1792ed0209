#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace basslv {

/// Runs body(i) for i in [0, n). Results must be written by index so the
/// outcome is independent of the thread schedule. threads <= 1 runs inline.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t lo = n * t / k, hi = n * (t + 1) / k;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n ? static_cast<int>(n) : 1;
}

}  // namespace basslv

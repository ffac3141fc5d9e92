#ifndef FRECHET_UTIL_HPP
#define FRECHET_UTIL_HPP

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace frechet {

inline int max_threads() {
    if (const char* env = std::getenv("FRECHET_SKEW_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Index-parallel loop with deterministic per-index work assignment.
inline void parallel_for(size_t n, const std::function<void(size_t)>& body) {
    int threads = std::min<size_t>(max_threads(), n);
    if (threads <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (size_t i = t; i < n; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace frechet

#endif

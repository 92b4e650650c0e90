#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace dualray {

// Static block partition over [0, n). threads <= 1 runs inline, which is the
// bit-reproducible path; worker results must not depend on scheduling order
// for multi-thread runs to match it, so callers only use this for
// element-independent loops.
inline void parallel_for(int threads, int n, const std::function<void(int, int)>& body) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        body(0, n);
        return;
    }
    int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int lo = w * chunk;
        int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dualray

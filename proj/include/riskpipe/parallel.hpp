#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace riskpipe {

// Worker count: RISKPIPE_WORKERS if set, otherwise 1 (sequential).
inline int worker_count() {
    const char* env = std::getenv("RISKPIPE_WORKERS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

// Static block partition of [0, n). Each index is processed exactly once and
// writes only its own output slot, so results match the sequential run
// regardless of worker count.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    const int workers = worker_count();
    if (workers <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    const size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const size_t begin = w * chunk;
        const size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([begin, end, &fn] {
            for (size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace riskpipe

#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bidding {

/// Worker count: BIDGAME_THREADS if set, hardware concurrency otherwise.
inline int worker_count() {
    if (const char* env = std::getenv("BIDGAME_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

/// Runs fn(i) for i in [0, n); results must be written to disjoint slots so
/// the merge is deterministic regardless of scheduling.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace bidding

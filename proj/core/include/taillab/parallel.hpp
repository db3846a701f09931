#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace taillab {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(worker, i) for i in [0, count) on up to `threads` workers; worker
// ids are dense in [0, threads), so callers can keep per-worker scratch. Each
// index owns its own output slot, which keeps results identical for any
// thread count. The first task exception is rethrown on the caller's thread.
inline void parallel_for_workers(int count, int threads,
                                 const std::function<void(int, int)>& fn) {
    threads = resolve_threads(threads);
    if (threads > count) threads = count < 1 ? 1 : count;
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(0, i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            int i;
            while ((i = next.fetch_add(1)) < count) {
                if (failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(t, i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    parallel_for_workers(count, threads, [&](int, int i) { fn(i); });
}

}  // namespace taillab

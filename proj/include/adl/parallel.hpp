#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace adl {

// ADL_THREADS if set and positive, else hardware concurrency (at least 1).
int worker_threads();

// Runs body(i) for i in [0, count) on up to worker_threads() threads. The first
// exception thrown by any task is rethrown after all workers finish.
inline void parallel_for(int count, const std::function<void(int)>& body) {
    const int workers = std::max(1, std::min(worker_threads(), count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace adl

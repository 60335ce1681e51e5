#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace eit {

// Index-sharded worker pool over immutable shared state; rethrows the first
// worker exception after joining.
inline void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    int nt = std::min<int>(jobs, (int)count);
    std::vector<std::thread> threads;
    std::exception_ptr err;
    std::mutex err_mx;
    threads.reserve((size_t)nt);
    for (int t = 0; t < nt; ++t)
        threads.emplace_back([&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : threads) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace eit

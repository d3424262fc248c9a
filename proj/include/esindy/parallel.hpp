#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace esindy {

// Global worker cap, set by the CLI --threads flag. 0 means hardware default.
int thread_cap();
void set_thread_cap(int n);

// Runs fn(i) for i in [0, n) partitioned statically across workers. Tasks must
// write only to their own output slots; results are then independent of the
// worker count, which the determinism tests rely on.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = thread_cap();
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            const int lo = w * chunk;
            const int hi = std::min(n, lo + chunk);
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace esindy

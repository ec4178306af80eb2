#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace greedyid {

// Runs fn(i) for i in [0, count) and collects results by index.
// Each task is independent, so the output is identical to the sequential
// loop no matter how tasks land on threads.
template <typename T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& fn,
                            bool parallel = true) {
    std::vector<T> out(count);
    if (count == 0) return out;
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_threads = parallel ? std::min<std::size_t>(count, hw ? hw : 1) : 1;
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
    return out;
}

}  // namespace greedyid

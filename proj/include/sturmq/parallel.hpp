#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sturmq {

// Global cap for data-parallel summations (0 = hardware concurrency).
void set_max_threads(unsigned n);
unsigned effective_threads();

struct Kahan {
    double sum = 0, carry = 0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Runs f(i) for i in [0, count) on a work-stealing counter. Callers keep
// per-slot results and merge them in index order, so totals do not depend on
// the worker count. Exceptions are re-thrown on the calling thread.
template <typename F>
void parallel_slots(std::size_t count, F&& f) {
    std::size_t T = effective_threads();
    if (T > count) T = count;
    if (T <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(T);
    for (std::size_t t = 0; t < T; ++t)
        workers.emplace_back([&] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                    if (failed.load(std::memory_order_relaxed)) return;
                    f(i);
                }
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        });
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

} // namespace sturmq

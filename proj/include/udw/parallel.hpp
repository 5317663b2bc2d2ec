#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace udw {

// Worker count: UDW_THREADS if set and positive, else hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("UDW_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// out[i] = f(i) for i in [0, n). Output order is fixed by i, so results do
// not depend on the thread count. If any call throws, the exception from the
// lowest index is rethrown after all workers stop.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f, unsigned threads = thread_count()) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errs(n);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> first_bad{std::numeric_limits<std::size_t>::max()};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || i > first_bad.load()) return;
            try {
                out[i] = f(i);
            } catch (...) {
                errs[i] = std::current_exception();
                std::size_t cur = first_bad.load();
                while (i < cur && !first_bad.compare_exchange_weak(cur, i)) {
                }
            }
        }
    };
    const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
    if (nt <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace udw

#include "stokesrbf/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace stokesrbf {

int worker_threads() {
    static const int n = [] {
        if (const char* env = std::getenv("STOKESRBF_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hc = std::thread::hardware_concurrency();
        return hc ? static_cast<int>(hc) : 1;
    }();
    return n;
}

void parallel_for(std::size_t n, int digits, const std::function<void(std::size_t)>& fn) {
    const int nw = std::min<std::size_t>(worker_threads(), n ? n : 1);
    if (nw <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&, w] {
            ScopedDigits guard(digits);
            const std::size_t lo = n * w / nw;
            const std::size_t hi = n * (w + 1) / nw;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace stokesrbf

#include "nsrl/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace nsrl {

namespace {

int resolve_default_width() {
    if (const char* env = std::getenv("NSRL_THREADS")) {
        int w = std::atoi(env);
        if (w >= 1) return w;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::atomic<int> g_width{0};

} // namespace

int thread_width() {
    int w = g_width.load(std::memory_order_relaxed);
    if (w == 0) {
        w = resolve_default_width();
        g_width.store(w, std::memory_order_relaxed);
    }
    return w;
}

void set_thread_width(int width) {
    g_width.store(width < 1 ? 1 : width, std::memory_order_relaxed);
}

void parallel_for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int width = thread_width();
    if (n == 0) return;
    if (width <= 1 || n < 2) {
        fn(0, n);
        return;
    }
    const std::size_t nchunks = std::min<std::size_t>(static_cast<std::size_t>(width), n);
    const std::size_t chunk = (n + nchunks - 1) / nchunks;
    std::vector<std::thread> workers;
    workers.reserve(nchunks);
    for (std::size_t c = 0; c < nchunks; ++c) {
        const std::size_t begin = c * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& w : workers) w.join();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_for_chunks(n, [&fn](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
    });
}

} // namespace nsrl

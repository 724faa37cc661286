#pragma once
// Chunked parallel-for over independent work units. Chunk geometry is fixed by
// the caller, never by the thread count, so accumulating per-chunk partials in
// chunk order gives bit-identical results on any machine.
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fraclab::detail {

inline void parallel_chunks(int n_chunks, int n_threads, const std::function<void(int)>& chunk_work) {
    if (n_chunks <= 0) return;
    if (n_threads <= 1 || n_chunks == 1) {
        for (int c = 0; c < n_chunks; ++c) chunk_work(c);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex err_mtx;
    auto worker = [&]() {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            const int c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= n_chunks) return;
            try {
                chunk_work(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!first_error) first_error = std::current_exception();
                stop.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::min(n_threads, n_chunks);
    pool.reserve(static_cast<size_t>(nt));
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace fraclab::detail

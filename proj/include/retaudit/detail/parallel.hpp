#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace retaudit::detail {

inline unsigned default_threads() {
    const unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : h;
}

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) {
    return n == 0 ? 0 : (n + chunk - 1) / chunk;
}

// Runs fn(chunk_index, begin, end) over fixed [begin, end) ranges of size
// `chunk`. Chunk boundaries depend only on n and chunk, never on the worker
// count, so callers that keep one result buffer per chunk and fold them in
// chunk order get bit-identical results for any thread count.
inline void for_each_chunk(std::size_t n, std::size_t chunk, unsigned threads,
                           const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    const std::size_t chunks = chunk_count(n, chunk);
    if (chunks == 0) {
        return;
    }
    auto run_chunk = [&](std::size_t ci) {
        const std::size_t begin = ci * chunk;
        const std::size_t end = std::min(begin + chunk, n);
        fn(ci, begin, end);
    };
    if (threads <= 1 || chunks == 1) {
        for (std::size_t ci = 0; ci < chunks; ++ci) {
            run_chunk(ci);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t ci = next.fetch_add(1);
            if (ci >= chunks) {
                return;
            }
            try {
                run_chunk(ci);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };
    const unsigned nworkers = static_cast<unsigned>(
        std::min<std::size_t>(threads, chunks));
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (unsigned t = 0; t < nworkers; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

}  // namespace retaudit::detail

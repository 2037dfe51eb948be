#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pathdep {

inline int default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, n).
// Chunk boundaries depend only on chunk_size, never on the worker count, so
// any per-chunk result combined later in chunk order is bit-identical across
// worker counts. This is the backbone of the reproducibility contract.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t chunk_size, int workers, Fn&& fn) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
    if (workers <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) break;
                fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n_chunks); // stop handing out work
        }
    };
    std::vector<std::thread> pool;
    const int nt = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(workers), n_chunks));
    pool.reserve(static_cast<std::size_t>(nt));
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Deterministic map-reduce: each chunk produces an accumulator via
// map(chunk, begin, end, acc); accumulators are then folded sequentially in
// chunk order with combine(total, acc).
template <class Acc, class Map, class Combine>
Acc chunked_reduce(std::size_t n, std::size_t chunk_size, int workers, Acc init,
                   Map&& map, Combine&& combine) {
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = n == 0 ? 0 : (n + chunk_size - 1) / chunk_size;
    std::vector<Acc> parts(n_chunks, init);
    parallel_chunks(n, chunk_size, workers, [&](std::size_t c, std::size_t b, std::size_t e) {
        map(c, b, e, parts[c]);
    });
    Acc total = std::move(init);
    for (std::size_t c = 0; c < n_chunks; ++c) combine(total, parts[c]);
    return total;
}

} // namespace pathdep

#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

// Deterministic block scheduler. Work is split into fixed blocks; each block
// owns its result slot, and callers reduce slots in block order afterwards, so
// results are independent of the worker count.

namespace graphgp {

inline int& max_threads_setting() {
    static int value = 1;
    return value;
}

/// Global worker-thread cap (the CLI maps --threads here). 1 = serial.
inline void set_max_threads(int n) { max_threads_setting() = n < 1 ? 1 : n; }
inline int max_threads() { return max_threads_setting(); }

/// Runs fn(block_index) for block_index in [0, num_blocks). Blocks are claimed
/// from a shared counter; fn must write only to its own block's slot.
template <typename Fn>
void parallel_for_blocks(std::size_t num_blocks, Fn&& fn) {
    int workers = max_threads();
    if (workers <= 1 || num_blocks <= 1) {
        for (std::size_t b = 0; b < num_blocks; ++b) fn(b);
        return;
    }
    if (static_cast<std::size_t>(workers) > num_blocks)
        workers = static_cast<int>(num_blocks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};

    auto body = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= num_blocks || failed.load()) return;
            try {
                fn(b);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace graphgp

#ifndef SPGEMM_PARALLEL_HPP
#define SPGEMM_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "spgemm/common.hpp"

namespace spgemm {

// Hands out contiguous row blocks through a shared counter; balances skewed
// per-row work without a pre-pass.
class BlockDispenser {
public:
    BlockDispenser(index_t total, index_t block)
        : total_(total), block_(std::max<index_t>(block, 1)) {}

    bool grab(index_t& begin, index_t& end)
    {
        const index_t b = next_.fetch_add(block_, std::memory_order_relaxed);
        if (b >= total_)
            return false;
        begin = b;
        end = std::min<index_t>(total_, b + block_);
        return true;
    }

private:
    std::atomic<index_t> next_{0};
    index_t total_;
    index_t block_;
};

// Runs fn(worker_index) on `workers` threads; a single worker runs inline.
// The first worker exception is rethrown after all threads join.
template <class F>
void run_workers(int workers, F&& fn)
{
    if (workers <= 1) {
        fn(0);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    std::exception_ptr first_error;
    std::atomic_flag error_claimed = ATOMIC_FLAG_INIT;
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                fn(w);
            } catch (...) {
                if (!error_claimed.test_and_set())
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& t : threads)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

// Parallel loop over [0, total) in dynamic blocks: fn(worker, begin, end).
template <class F>
void parallel_rows(index_t total, int workers, index_t block, F&& fn)
{
    BlockDispenser dispenser(total, block);
    run_workers(workers, [&](int w) {
        index_t b, e;
        while (dispenser.grab(b, e))
            fn(w, b, e);
    });
}

} // namespace spgemm

#endif

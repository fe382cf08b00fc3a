#include "spgemm/memory_pool.hpp"

#include <algorithm>
#include <new>
#include <thread>

namespace spgemm {

namespace {
constexpr std::uint8_t kFree = 0;
constexpr std::uint8_t kHeld = 1;
} // namespace

MemoryPool::MemoryPool(index_t num_chunks, std::int64_t chunk_slots, PoolMode mode)
    : num_chunks_(num_chunks), chunk_slots_(chunk_slots), mode_(mode),
      states_(static_cast<std::size_t>(num_chunks))
{
    if (num_chunks < 1 || chunk_slots < 1)
        throw ContractError("MemoryPool: need at least one chunk of at least one slot");
    const std::size_t total = static_cast<std::size_t>(num_chunks) * chunk_bytes();
    storage_.reset(static_cast<std::byte*>(::operator new[](total, std::align_val_t{64})));
}

MemoryPool::Chunk MemoryPool::allocate(index_t hint)
{
    if (hint < 0)
        throw ContractError("MemoryPool::allocate: negative hint");

    index_t id = kEmptySlotChunk;
    if (mode_ == PoolMode::One2One) {
        if (hint >= num_chunks_)
            throw ContractError("MemoryPool::allocate: one2one hint exceeds chunk count");
        if (states_[hint].exchange(kHeld, std::memory_order_acquire) != kFree)
            throw ContractError("MemoryPool::allocate: worker already holds its chunk");
        id = hint;
    } else {
        const index_t start = hint % num_chunks_;
        int failed_scans = 0;
        for (;;) {
            for (index_t step = 0; step < num_chunks_; ++step) {
                const index_t c = (start + step) % num_chunks_;
                std::uint8_t expected = kFree;
                if (states_[c].compare_exchange_strong(expected, kHeld,
                                                       std::memory_order_acquire,
                                                       std::memory_order_relaxed)) {
                    id = c;
                    break;
                }
            }
            if (id != kEmptySlotChunk)
                break;
            spins_.fetch_add(1, std::memory_order_relaxed);
            if (++failed_scans >= 64) {
                failed_scans = 0;
                std::this_thread::yield();
            }
        }
    }

    allocations_.fetch_add(1, std::memory_order_relaxed);
    return Chunk{id, {storage_.get() + static_cast<std::size_t>(id) * chunk_bytes(),
                      static_cast<std::size_t>(chunk_bytes())}};
}

void MemoryPool::release(Chunk& chunk)
{
    if (!chunk.valid() || chunk.id >= num_chunks_)
        throw ContractError("MemoryPool::release: invalid chunk handle");
    if (states_[chunk.id].exchange(kFree, std::memory_order_release) != kHeld)
        throw ContractError("MemoryPool::release: chunk was not held");
    chunk.id = kEmptySlotChunk;
    chunk.data = {};
}

bool MemoryPool::all_free() const
{
    for (const auto& s : states_)
        if (s.load(std::memory_order_acquire) != kFree)
            return false;
    return true;
}

PoolSpec plan_pool(index_t concurrency, flops_t upper_bound_row, PoolMode mode,
                   std::int64_t memory_budget_bytes, index_t overestimate)
{
    if (concurrency < 1)
        throw ContractError("plan_pool: concurrency must be >= 1");
    if (upper_bound_row < 0)
        throw ContractError("plan_pool: negative row bound");
    if (overestimate < 1)
        throw ContractError("plan_pool: overestimate must be >= 1");

    const std::int64_t bound = std::max<flops_t>(upper_bound_row, 1);
    const std::int64_t chunk_slots =
        (bound + kChunkSlotsPerCacheLine - 1) / kChunkSlotsPerCacheLine * kChunkSlotsPerCacheLine;
    const std::int64_t chunk_bytes = chunk_slots * kChunkSlotBytes;

    if (chunk_bytes > memory_budget_bytes)
        throw PoolSizingError("plan_pool: a single chunk exceeds the memory budget");

    index_t num_chunks = mode == PoolMode::One2One ? concurrency : overestimate * concurrency;
    while (static_cast<std::int64_t>(num_chunks) * chunk_bytes > memory_budget_bytes
           && num_chunks > 1)
        num_chunks = std::max<index_t>(1, num_chunks / 2);
    if (mode == PoolMode::One2One && num_chunks < concurrency)
        mode = PoolMode::Many2Many; // too few chunks for a unique mapping

    return {num_chunks, chunk_slots, mode};
}

MemoryPool size_pool(index_t concurrency, flops_t upper_bound_row, PoolMode mode,
                     std::int64_t memory_budget_bytes, index_t overestimate)
{
    const PoolSpec spec =
        plan_pool(concurrency, upper_bound_row, mode, memory_budget_bytes, overestimate);
    return MemoryPool(spec.num_chunks, spec.chunk_slots, spec.mode);
}

} // namespace spgemm

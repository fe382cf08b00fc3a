#ifndef SPGEMM_MEMORY_POOL_HPP
#define SPGEMM_MEMORY_POOL_HPP

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spgemm/common.hpp"

namespace spgemm {

enum class PoolMode {
    One2One,   // chunk i belongs to worker i; allocate returns it directly
    Many2Many, // scan-and-claim from the hint, spin until a chunk frees up
};

// Chunk payload slot, in bytes. Sized for the widest per-entry footprint of
// the second-level accumulators (key, value, and chain bookkeeping), so one
// pool serves the symbolic and the numeric phase of a multiply.
inline constexpr std::int64_t kChunkSlotBytes = 32;
inline constexpr std::int64_t kChunkSlotsPerCacheLine = 2; // 64-byte lines

// Fixed-chunk pool servicing level-2 accumulator allocations. Chunks are
// claimed and released linearizably; the backing storage of a held chunk is
// exclusively writable by its holder.
class MemoryPool {
public:
    struct Chunk {
        index_t id = kEmptySlotChunk;
        std::span<std::byte> data;
        bool valid() const { return id >= 0; }
    };
    static constexpr index_t kEmptySlotChunk = -1;

    MemoryPool(index_t num_chunks, std::int64_t chunk_slots, PoolMode mode);

    MemoryPool(const MemoryPool&) = delete;
    MemoryPool& operator=(const MemoryPool&) = delete;

    // One2One: returns chunk #hint (hint must be a worker index that holds
    // no chunk). Many2Many: first free chunk at or cyclically after hint,
    // spinning until one is released.
    Chunk allocate(index_t hint);
    void release(Chunk& chunk);

    index_t num_chunks() const { return num_chunks_; }
    std::int64_t chunk_slots() const { return chunk_slots_; }
    std::int64_t chunk_bytes() const { return chunk_slots_ * kChunkSlotBytes; }
    PoolMode mode() const { return mode_; }

    bool all_free() const;
    std::int64_t allocation_count() const { return allocations_.load(); }
    std::int64_t spin_count() const { return spins_.load(); }

private:
    struct AlignedDelete {
        void operator()(std::byte* p) const
        {
            ::operator delete[](p, std::align_val_t{64});
        }
    };

    index_t num_chunks_;
    std::int64_t chunk_slots_;
    PoolMode mode_;
    std::unique_ptr<std::byte[], AlignedDelete> storage_;
    std::vector<std::atomic<std::uint8_t>> states_; // 0 = Free, 1 = Held
    std::atomic<std::int64_t> allocations_{0};
    std::atomic<std::int64_t> spins_{0};
};

inline constexpr std::int64_t kDefaultPoolBudgetBytes = std::int64_t{1} << 30;
inline constexpr index_t kMany2ManyOverestimate = 2;

struct PoolSpec {
    index_t num_chunks;
    std::int64_t chunk_slots;
    PoolMode mode;
};

// Pool sizing for `concurrency` workers whose per-row need is bounded by
// upper_bound_row entries. One2One reserves exactly one chunk per worker;
// Many2Many overestimates the concurrency by `overestimate` (default 2x).
// Chunk size rounds the bound up to a cache-line multiple of slots. If the
// pool exceeds the memory budget the chunk count is reduced (falling back to
// Many2Many when it drops below the worker count); a single over-budget
// chunk raises PoolSizingError.
PoolSpec plan_pool(index_t concurrency, flops_t upper_bound_row, PoolMode mode,
                   std::int64_t memory_budget_bytes = kDefaultPoolBudgetBytes,
                   index_t overestimate = kMany2ManyOverestimate);

MemoryPool size_pool(index_t concurrency, flops_t upper_bound_row, PoolMode mode,
                     std::int64_t memory_budget_bytes = kDefaultPoolBudgetBytes,
                     index_t overestimate = kMany2ManyOverestimate);

} // namespace spgemm

#endif

#ifndef SPGEMM_ACCUMULATORS_HPP
#define SPGEMM_ACCUMULATORS_HPP

#include <bit>
#include <cmath>
#include <cstring>
#include <span>
#include <vector>

#include "spgemm/common.hpp"

namespace spgemm {

enum class InsertResult { Ok, Full };

// Full is a routing signal, not an error: the caller escalates the failed
// insertion to the second-level accumulator.

struct SumCombine {
    template <class T> void operator()(T& slot, T v) const { slot += v; }
};

struct BitOrCombine {
    template <class T> void operator()(T& slot, T v) const { slot |= v; }
};

inline constexpr index_t kEmptySlot = -1;

inline index_t ceil_pow2(index_t n)
{
    return static_cast<index_t>(std::bit_ceil(static_cast<std::uint32_t>(std::max<index_t>(n, 1))));
}

namespace detail {

// Carves typed arrays out of a raw buffer. The buffer must be 8-byte aligned;
// allocation order below keeps every array aligned.
class Carver {
public:
    explicit Carver(std::span<std::byte> storage) : storage_(storage) {}

    template <class T> std::span<T> take(std::size_t count)
    {
        const std::size_t bytes = count * sizeof(T);
        if (used_ + bytes > storage_.size())
            throw ContractError("accumulator storage is smaller than its layout");
        T* p = reinterpret_cast<T*>(storage_.data() + used_);
        used_ += bytes;
        return {p, count};
    }

private:
    std::span<std::byte> storage_;
    std::size_t used_ = 0;
};

} // namespace detail

// Linked-list hashmap accumulator: four parallel arrays (begins, nexts, ids,
// values). begins has power-of-two length so the bucket is key & mask rather
// than a modulo. Performance does not degrade with occupancy; when all
// capacity slots are claimed, inserts of new keys report Full.
template <class Payload>
class LlAccumulator {
public:
    static std::size_t required_bytes(index_t capacity)
    {
        const index_t cap = std::max<index_t>(capacity, 1);
        return static_cast<std::size_t>(cap) * (sizeof(Payload) + 2 * sizeof(index_t))
            + static_cast<std::size_t>(ceil_pow2(cap)) * sizeof(index_t);
    }

    // View over external storage (a memory-pool chunk).
    LlAccumulator(index_t capacity, std::span<std::byte> storage) { init(capacity, storage); }

    // Owning variant for worker-private level-1 use.
    explicit LlAccumulator(index_t capacity)
        : own_((required_bytes(capacity) + 7) / 8)
    {
        init(capacity, std::as_writable_bytes(std::span<std::uint64_t>(own_)));
    }

    // spans alias the owning buffer, so copies would dangle
    LlAccumulator(const LlAccumulator&) = delete;
    LlAccumulator& operator=(const LlAccumulator&) = delete;
    LlAccumulator(LlAccumulator&&) noexcept = default;
    LlAccumulator& operator=(LlAccumulator&&) noexcept = default;

    template <class Combine>
    InsertResult insert(index_t key, Payload v, Combine combine)
    {
        const std::uint32_t bucket = static_cast<std::uint32_t>(key) & mask_;
        for (index_t s = begins_[bucket]; s != kEmptySlot; s = nexts_[s]) {
            ++probes_;
            if (ids_[s] == key) {
                combine(values_[s], v);
                return InsertResult::Ok;
            }
        }
        if (used_ == capacity_)
            return InsertResult::Full;
        const index_t s = used_++;
        ids_[s] = key;
        values_[s] = v;
        nexts_[s] = begins_[bucket];
        begins_[bucket] = s;
        return InsertResult::Ok;
    }

    template <class F> void for_each(F&& f) const
    {
        for (index_t s = 0; s < used_; ++s)
            f(ids_[s], values_[s]);
    }

    // Clears only the buckets of used entries.
    void reset()
    {
        for (index_t s = 0; s < used_; ++s)
            begins_[static_cast<std::uint32_t>(ids_[s]) & mask_] = kEmptySlot;
        used_ = 0;
    }

    index_t used() const { return used_; }
    index_t capacity() const { return capacity_; }
    index_t bucket_count() const { return static_cast<index_t>(begins_.size()); }
    std::int64_t probe_count() const { return probes_; }

private:
    void init(index_t capacity, std::span<std::byte> storage)
    {
        capacity_ = std::max<index_t>(capacity, 1);
        const index_t buckets = ceil_pow2(capacity_);
        mask_ = static_cast<std::uint32_t>(buckets - 1);
        detail::Carver carve(storage);
        values_ = carve.template take<Payload>(static_cast<std::size_t>(capacity_));
        begins_ = carve.template take<index_t>(static_cast<std::size_t>(buckets));
        nexts_ = carve.template take<index_t>(static_cast<std::size_t>(capacity_));
        ids_ = carve.template take<index_t>(static_cast<std::size_t>(capacity_));
        std::memset(begins_.data(), 0xFF, begins_.size_bytes());
        used_ = 0;
    }

    std::vector<std::uint64_t> own_;
    std::span<Payload> values_;
    std::span<index_t> begins_, nexts_, ids_;
    index_t capacity_ = 0;
    index_t used_ = 0;
    std::uint32_t mask_ = 0;
    std::int64_t probes_ = 0;
};

// Linear-probing hashmap accumulator: ids/values arrays with -1 marking an
// empty slot. New keys go to the first free slot after the hash position;
// once max_new_keys distinct keys are stored, further new keys report Full
// (the occupancy cut-off that avoids near-full probe blowup). Existing keys
// still combine past the cut-off.
template <class Payload>
class LpAccumulator {
public:
    static std::size_t required_bytes(index_t capacity_pow2, index_t max_new_keys)
    {
        return static_cast<std::size_t>(capacity_pow2) * (sizeof(Payload) + sizeof(index_t))
            + static_cast<std::size_t>(std::max<index_t>(max_new_keys, 1)) * sizeof(index_t);
    }

    static index_t capacity_for(index_t expected_keys, double max_occupancy)
    {
        const double need = std::max<index_t>(expected_keys, 1) / std::max(max_occupancy, 1e-6);
        return ceil_pow2(static_cast<index_t>(std::ceil(need)));
    }

    LpAccumulator(index_t capacity_pow2, index_t max_new_keys, std::span<std::byte> storage)
    {
        init(capacity_pow2, max_new_keys, storage);
    }

    // Owning level-1 variant sized from the occupancy rule: capacity is the
    // smallest power of two >= expected/occupancy, cap = ceil(occ * capacity).
    LpAccumulator(index_t expected_keys, double max_occupancy)
    {
        const index_t cap = capacity_for(expected_keys, max_occupancy);
        const index_t max_new = std::min<index_t>(
            static_cast<index_t>(std::ceil(max_occupancy * cap)), cap - 1);
        own_.resize((required_bytes(cap, max_new) + 7) / 8);
        init(cap, max_new, std::as_writable_bytes(std::span<std::uint64_t>(own_)));
    }

    LpAccumulator(const LpAccumulator&) = delete;
    LpAccumulator& operator=(const LpAccumulator&) = delete;
    LpAccumulator(LpAccumulator&&) noexcept = default;
    LpAccumulator& operator=(LpAccumulator&&) noexcept = default;

    template <class Combine>
    InsertResult insert(index_t key, Payload v, Combine combine)
    {
        std::uint32_t p = static_cast<std::uint32_t>(key) & mask_;
        for (;;) {
            ++probes_;
            const index_t id = ids_[p];
            if (id == key) {
                combine(values_[p], v);
                return InsertResult::Ok;
            }
            if (id == kEmptySlot) {
                if (used_ == max_new_)
                    return InsertResult::Full;
                ids_[p] = key;
                values_[p] = v;
                slots_[used_++] = static_cast<index_t>(p);
                return InsertResult::Ok;
            }
            p = (p + 1) & mask_;
        }
    }

    template <class F> void for_each(F&& f) const
    {
        for (index_t s = 0; s < used_; ++s)
            f(ids_[slots_[s]], values_[slots_[s]]);
    }

    void reset()
    {
        for (index_t s = 0; s < used_; ++s)
            ids_[slots_[s]] = kEmptySlot;
        used_ = 0;
    }

    // Slot a key occupies, or -1; lookups stop at the first empty slot.
    index_t probe_position(index_t key)
    {
        std::uint32_t p = static_cast<std::uint32_t>(key) & mask_;
        for (;;) {
            ++probes_;
            if (ids_[p] == key)
                return static_cast<index_t>(p);
            if (ids_[p] == kEmptySlot)
                return kEmptySlot;
            p = (p + 1) & mask_;
        }
    }

    index_t used() const { return used_; }
    index_t capacity() const { return static_cast<index_t>(ids_.size()); }
    index_t max_new_keys() const { return max_new_; }
    std::int64_t probe_count() const { return probes_; }

private:
    void init(index_t capacity_pow2, index_t max_new_keys, std::span<std::byte> storage)
    {
        if (std::popcount(static_cast<std::uint32_t>(capacity_pow2)) != 1)
            throw ContractError("LpAccumulator: capacity must be a power of two");
        max_new_ = std::min<index_t>(max_new_keys, capacity_pow2 - 1);
        mask_ = static_cast<std::uint32_t>(capacity_pow2 - 1);
        detail::Carver carve(storage);
        values_ = carve.template take<Payload>(static_cast<std::size_t>(capacity_pow2));
        ids_ = carve.template take<index_t>(static_cast<std::size_t>(capacity_pow2));
        slots_ = carve.template take<index_t>(
            static_cast<std::size_t>(std::max<index_t>(max_new_, 1)));
        std::memset(ids_.data(), 0xFF, ids_.size_bytes());
        used_ = 0;
    }

    std::vector<std::uint64_t> own_;
    std::span<Payload> values_;
    std::span<index_t> ids_;
    std::span<index_t> slots_; // claimed positions, in insertion order
    index_t used_ = 0;
    index_t max_new_ = 0;
    std::uint32_t mask_ = 0;
    std::int64_t probes_ = 0;
};

// Dense accumulator over a fixed column domain: a value array plus a marker
// array, with the touched list recording which positions to undo on reset.
// Single-level; insert never reports Full. The numeric phase points the
// touched list directly at the output row's column span.
template <class Payload>
class DenseAccumulator {
public:
    explicit DenseAccumulator(index_t domain_size)
        : dense_(static_cast<std::size_t>(domain_size), Payload{}),
          marked_(static_cast<std::size_t>(domain_size), 0),
          touched_own_(static_cast<std::size_t>(domain_size)),
          domain_(domain_size)
    {
        touched_ = touched_own_.data();
        touched_cap_ = domain_;
    }

    DenseAccumulator(const DenseAccumulator&) = delete;
    DenseAccumulator& operator=(const DenseAccumulator&) = delete;
    DenseAccumulator(DenseAccumulator&&) noexcept = default;
    DenseAccumulator& operator=(DenseAccumulator&&) noexcept = default;

    // external_touched lets the numeric phase record first-touched columns
    // straight into the output row; capacity bounds how many the row may see.
    void begin_row(index_t* external_touched, index_t capacity = 0)
    {
        touched_ = external_touched ? external_touched : touched_own_.data();
        touched_cap_ = external_touched ? capacity : domain_;
    }

    template <class Combine>
    InsertResult insert(index_t key, Payload v, Combine combine)
    {
        if (key < 0 || key >= domain_)
            throw ContractError("DenseAccumulator: key outside the column domain");
        if (!marked_[key]) {
            if (count_ == touched_cap_)
                throw ContractError("DenseAccumulator: row exceeds the declared structure");
            marked_[key] = 1;
            dense_[key] = v;
            touched_[count_++] = key;
        } else {
            combine(dense_[key], v);
        }
        return InsertResult::Ok;
    }

    template <class F> void for_each(F&& f) const
    {
        for (index_t s = 0; s < count_; ++s)
            f(touched_[s], dense_[touched_[s]]);
    }

    // Cost proportional to the touched count, not the domain size.
    void reset()
    {
        for (index_t s = 0; s < count_; ++s) {
            marked_[touched_[s]] = 0;
            dense_[touched_[s]] = Payload{};
        }
        count_ = 0;
    }

    index_t used() const { return count_; }
    index_t domain() const { return domain_; }

private:
    std::vector<Payload> dense_;
    std::vector<std::uint8_t> marked_;
    std::vector<index_t> touched_own_;
    index_t* touched_ = nullptr;
    index_t touched_cap_ = 0;
    index_t count_ = 0;
    index_t domain_ = 0;
};

} // namespace spgemm

#endif

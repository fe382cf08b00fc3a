#include "spgemm/engine.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <optional>

#include "spgemm/accumulators.hpp"
#include "spgemm/parallel.hpp"

namespace spgemm {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class Payload>
using CombineFor =
    std::conditional_t<std::is_same_v<Payload, double>, SumCombine, BitOrCombine>;

// ---- row sources ----------------------------------------------------------
// A source exposes the rows of the right-hand operand as (key, payload)
// entries. The numeric source scales B values by A(i,j); the symbolic
// sources carry structure only.

struct NumericSource {
    using Payload = double;
    const CsrMatrix& b;
    offset_t row_base(index_t j) const { return b.row_offsets[j]; }
    index_t row_size(index_t j) const { return b.row_size(j); }
    index_t key(offset_t base, index_t t) const { return b.col_indices[base + t]; }
    Payload payload(offset_t base, index_t t, double a_val) const
    {
        return a_val * b.values[base + t];
    }
};

struct RawStructSource {
    using Payload = std::uint32_t;
    const CsrMatrix& b;
    offset_t row_base(index_t j) const { return b.row_offsets[j]; }
    index_t row_size(index_t j) const { return b.row_size(j); }
    index_t key(offset_t base, index_t t) const { return b.col_indices[base + t]; }
    Payload payload(offset_t, index_t, double) const { return 1u; }
};

struct CompressedSource {
    using Payload = std::uint32_t;
    const CompressedGraph& g;
    offset_t row_base(index_t j) const { return g.row_offsets[j]; }
    index_t row_size(index_t j) const { return g.row_size(j); }
    index_t key(offset_t base, index_t t) const { return g.csi[base + t]; }
    Payload payload(offset_t base, index_t t, double) const { return g.cs[base + t]; }
};

// ---- accumulator wrappers --------------------------------------------------
// Uniform per-row interface over the three accumulators: level-1 insert with
// escalation to a pool-backed level-2 for the hashmaps, single-level for
// dense. Keys never appear in both levels: an existing key combines where it
// lives, and only new keys that find L1 full go to L2.

template <class Payload>
class TwoLevelLl {
public:
    TwoLevelLl(index_t l1_capacity, MemoryPool* pool, index_t worker, index_t l2_capacity)
        : l1_(l1_capacity), pool_(pool), worker_(worker), l2_capacity_(l2_capacity)
    {
    }

    void begin_row(index_t*, index_t) {}

    void insert(index_t key, Payload v)
    {
        if (l1_.insert(key, v, CombineFor<Payload>{}) == InsertResult::Full) {
            if (!l2_)
                acquire_l2();
            if (l2_->insert(key, v, CombineFor<Payload>{}) != InsertResult::Ok)
                throw std::logic_error("level-2 accumulator overflow: chunk bound violated");
            ++l2_inserts_;
        }
    }

    template <class F> void for_each(F&& f) const
    {
        l1_.for_each(f);
        if (l2_)
            l2_->for_each(f);
    }

    void end_row()
    {
        l1_.reset();
        if (l2_) {
            l2_.reset();
            pool_->release(chunk_);
        }
    }

    void flush(std::atomic<std::int64_t>& l2_sink) { l2_sink.fetch_add(l2_inserts_); }

private:
    void acquire_l2()
    {
        chunk_ = pool_->allocate(worker_);
        l2_.emplace(l2_capacity_, chunk_.data);
    }

    LlAccumulator<Payload> l1_;
    std::optional<LlAccumulator<Payload>> l2_;
    MemoryPool* pool_;
    MemoryPool::Chunk chunk_;
    index_t worker_;
    index_t l2_capacity_;
    std::int64_t l2_inserts_ = 0;
};

template <class Payload>
class TwoLevelLp {
public:
    TwoLevelLp(index_t l1_capacity, double max_occupancy, MemoryPool* pool, index_t worker,
               index_t l2_capacity)
        : l1_(l1_capacity, max_occupancy), occupancy_(max_occupancy), pool_(pool),
          worker_(worker), l2_capacity_(l2_capacity)
    {
    }

    void begin_row(index_t*, index_t) {}

    void insert(index_t key, Payload v)
    {
        if (l1_.insert(key, v, CombineFor<Payload>{}) == InsertResult::Full) {
            if (!l2_)
                acquire_l2();
            if (l2_->insert(key, v, CombineFor<Payload>{}) != InsertResult::Ok)
                throw std::logic_error("level-2 accumulator overflow: chunk bound violated");
            ++l2_inserts_;
        }
    }

    template <class F> void for_each(F&& f) const
    {
        l1_.for_each(f);
        if (l2_)
            l2_->for_each(f);
    }

    void end_row()
    {
        l1_.reset();
        if (l2_) {
            l2_.reset();
            pool_->release(chunk_);
        }
    }

    void flush(std::atomic<std::int64_t>& l2_sink) { l2_sink.fetch_add(l2_inserts_); }

private:
    void acquire_l2()
    {
        chunk_ = pool_->allocate(worker_);
        // prefer the occupancy-ruled size; fall back to the smallest table
        // that still holds every new key when the chunk is tight
        index_t cap = LpAccumulator<Payload>::capacity_for(l2_capacity_, occupancy_);
        if (LpAccumulator<Payload>::required_bytes(cap, l2_capacity_) > chunk_.data.size())
            cap = ceil_pow2(l2_capacity_ + 1);
        l2_.emplace(cap, l2_capacity_, chunk_.data);
    }

    LpAccumulator<Payload> l1_;
    std::optional<LpAccumulator<Payload>> l2_;
    double occupancy_;
    MemoryPool* pool_;
    MemoryPool::Chunk chunk_;
    index_t worker_;
    index_t l2_capacity_;
    std::int64_t l2_inserts_ = 0;
};

template <class Payload>
class SingleLevelDense {
public:
    explicit SingleLevelDense(index_t domain) : acc_(domain) {}

    void begin_row(index_t* external_touched, index_t capacity)
    {
        acc_.begin_row(external_touched, capacity);
    }

    void insert(index_t key, Payload v) { acc_.insert(key, v, CombineFor<Payload>{}); }

    template <class F> void for_each(F&& f) const { acc_.for_each(f); }

    void end_row() { acc_.reset(); }

    void flush(std::atomic<std::int64_t>&) {}

private:
    DenseAccumulator<Payload> acc_;
};

// ---- row sinks ------------------------------------------------------------

struct SymbolicSink {
    std::vector<index_t>& row_sizes;

    template <class Acc> void begin(Acc& acc, index_t) { acc.begin_row(nullptr, 0); }

    template <class Acc> void finish(Acc& acc, index_t i)
    {
        flops_t count = 0;
        acc.for_each([&](index_t, std::uint32_t word) { count += std::popcount(word); });
        row_sizes[i] = static_cast<index_t>(count);
    }
};

struct NumericSink {
    CsrMatrix& c;

    template <class Acc> void begin(Acc& acc, index_t i)
    {
        const offset_t lo = c.row_offsets[i];
        acc.begin_row(c.col_indices.data() + lo,
                      static_cast<index_t>(c.row_offsets[i + 1] - lo));
    }

    template <class Acc> void finish(Acc& acc, index_t i)
    {
        const offset_t hi = c.row_offsets[i + 1];
        offset_t p = c.row_offsets[i];
        acc.for_each([&](index_t key, double v) {
            if (p >= hi)
                throw std::logic_error("numeric row exceeds the symbolic structure");
            c.col_indices[p] = key;
            c.values[p] = v;
            ++p;
        });
        if (p != hi)
            throw std::logic_error("numeric row shorter than the symbolic structure");
    }
};

// ---- kernel ---------------------------------------------------------------

template <class Source, class Acc, class Sink>
void process_row(const CsrMatrix& a, const Source& src, Scheme scheme, Acc& acc, Sink& sink,
                 std::vector<flops_t>& prefix, index_t i)
{
    sink.begin(acc, i);
    const offset_t abeg = a.row_begin(i);
    const offset_t aend = a.row_end(i);

    if (scheme == Scheme::ThreadSequential) {
        for (offset_t p = abeg; p < aend; ++p) {
            const index_t j = a.col_indices[p];
            const double av = a.values[p];
            const offset_t base = src.row_base(j);
            const index_t len = src.row_size(j);
            for (index_t t = 0; t < len; ++t)
                acc.insert(src.key(base, t), src.payload(base, t, av));
        }
    } else {
        // flatten the two inner loops and map each multiplication index back
        // through the searchable prefix of source-row sizes
        const index_t alen = static_cast<index_t>(aend - abeg);
        prefix.resize(static_cast<std::size_t>(alen) + 1);
        prefix[0] = 0;
        for (index_t q = 0; q < alen; ++q)
            prefix[q + 1] = prefix[q] + src.row_size(a.col_indices[abeg + q]);
        const flops_t total = prefix[alen];
        const std::span<const flops_t> pre(prefix.data(), static_cast<std::size_t>(alen) + 1);
        for (flops_t t = 0; t < total; ++t) {
            const auto [seg, off] = flat_position(pre, t);
            const offset_t p = abeg + seg;
            const index_t j = a.col_indices[p];
            const offset_t base = src.row_base(j);
            acc.insert(src.key(base, static_cast<index_t>(off)),
                       src.payload(base, static_cast<index_t>(off), a.values[p]));
        }
    }

    sink.finish(acc, i);
    acc.end_row();
}

template <class Source, class MakeAcc, class Sink>
void drive_rows(const CsrMatrix& a, const Source& src, Scheme scheme, int workers,
                index_t block, MakeAcc make_acc, Sink sink, PhaseStats& stats)
{
    BlockDispenser dispenser(a.num_rows, block);
    std::atomic<std::int64_t> l2_inserts{0};
    run_workers(workers, [&](int w) {
        auto acc = make_acc(w);
        Sink worker_sink = sink;
        std::vector<flops_t> prefix;
        index_t lo, hi;
        while (dispenser.grab(lo, hi))
            for (index_t i = lo; i < hi; ++i)
                process_row(a, src, scheme, acc, worker_sink, prefix, i);
        acc.flush(l2_inserts);
    });
    stats.l2_inserts += l2_inserts.load();
}

template <class Source, class Sink>
void run_phase(const CsrMatrix& a, const Source& src, const ResolvedConfig& rc,
               const SpgemmConfig& cfg, Sink sink, PhaseStats& stats)
{
    using Payload = typename Source::Payload;
    const int workers = std::max(cfg.worker_count, 1);

    switch (rc.accumulator) {
    case AccumulatorKind::Dense:
        drive_rows(a, src, rc.scheme, workers, cfg.row_block,
                   [&](int) { return SingleLevelDense<Payload>(rc.effective_k); }, sink, stats);
        break;
    case AccumulatorKind::LL: {
        const PoolSpec spec =
            plan_pool(workers, rc.l2_capacity, cfg.pool_mode, cfg.pool_budget_bytes);
        MemoryPool pool(spec.num_chunks, spec.chunk_slots, spec.mode);
        drive_rows(a, src, rc.scheme, workers, cfg.row_block,
                   [&](int w) {
                       return TwoLevelLl<Payload>(rc.l1_capacity, &pool, w, rc.l2_capacity);
                   },
                   sink, stats);
        stats.pool_allocations += pool.allocation_count();
        break;
    }
    case AccumulatorKind::LP: {
        const PoolSpec spec =
            plan_pool(workers, rc.l2_capacity, cfg.pool_mode, cfg.pool_budget_bytes);
        MemoryPool pool(spec.num_chunks, spec.chunk_slots, spec.mode);
        drive_rows(a, src, rc.scheme, workers, cfg.row_block,
                   [&](int w) {
                       return TwoLevelLp<Payload>(rc.l1_capacity, cfg.lp_max_occupancy, &pool,
                                                  w, rc.l2_capacity);
                   },
                   sink, stats);
        stats.pool_allocations += pool.allocation_count();
        break;
    }
    case AccumulatorKind::Auto:
        throw std::logic_error("run_phase: accumulator choice was not resolved");
    }
}

index_t ceil_div_words(index_t k)
{
    return (k + kBitsPerWord - 1) / kBitsPerWord;
}

} // namespace

std::pair<index_t, flops_t> flat_position(std::span<const flops_t> prefix, flops_t t)
{
    const auto it = std::upper_bound(prefix.begin(), prefix.end(), t);
    const index_t seg = static_cast<index_t>(it - prefix.begin() - 1);
    return {seg, t - prefix[seg]};
}

ResolvedConfig resolve_config(Phase phase, index_t k, const FlopsStats& stats,
                              const CompressionReport& report, const SpgemmConfig& cfg,
                              flops_t row_upper_bound)
{
    ResolvedConfig rc;
    const bool compressed = phase == Phase::Symbolic && report.applied;
    rc.effective_k = compressed ? ceil_div_words(k) : k;

    if (cfg.accumulator != AccumulatorKind::Auto) {
        rc.accumulator = cfg.accumulator;
        rc.scheme = cfg.scheme;
    } else if (rc.effective_k < cfg.dense_cutoff_k) {
        rc.accumulator = AccumulatorKind::Dense;
        rc.scheme = cfg.scheme;
    } else if (stats.avg_row_flops < cfg.avg_flops_cutoff) {
        rc.accumulator = AccumulatorKind::LL;
        rc.scheme = cfg.scheme;
    } else {
        rc.accumulator = AccumulatorKind::LP;
        rc.scheme = Scheme::ThreadFlatParallel;
    }

    // an accumulator never holds more distinct keys than the column domain
    const flops_t bound =
        std::max<flops_t>(std::min<flops_t>(row_upper_bound, rc.effective_k), 1);
    rc.l2_capacity = static_cast<index_t>(bound);
    rc.l1_capacity = cfg.l1_capacity > 0 ? cfg.l1_capacity : rc.l2_capacity;
    return rc;
}

SpgemmHandle symbolic(const CsrMatrix& a, const CsrMatrix& b, const SpgemmConfig& cfg)
{
    if (a.num_cols != b.num_rows)
        throw ContractError("symbolic: inner dimensions do not match");

    SpgemmHandle h;
    h.config = cfg;
    h.m = a.num_rows;
    h.n = a.num_cols;
    h.k = b.num_cols;
    h.nnz_a = a.nnz();
    h.nnz_b = b.nnz();
    h.flops = flops_stats(a, b);
    h.avg_row_size_estimate =
        h.flops.avg_row_flops / std::max(cfg.collapse_divisor, 1);

    const auto t_compress = Clock::now();
    CompressionDecision decision = decide_compression(
        a, b, h.flops, cfg.compression_gate, cfg.compression, cfg.worker_count);
    h.compression = decision.report;
    h.compress_ms = ms_since(t_compress);

    const flops_t raw_bound =
        decision.report.applied ? decision.report.compressed_max_row_flops
                                : h.flops.max_row_flops;
    h.symbolic_choice = resolve_config(Phase::Symbolic, b.num_cols, h.flops, h.compression,
                                       cfg, raw_bound);

    const auto t_sym = Clock::now();
    std::vector<index_t> row_sizes(static_cast<std::size_t>(a.num_rows), 0);
    SymbolicSink sink{row_sizes};
    if (decision.report.applied)
        run_phase(a, CompressedSource{*decision.graph}, h.symbolic_choice, cfg, sink,
                  h.symbolic_stats);
    else
        run_phase(a, RawStructSource{b}, h.symbolic_choice, cfg, sink, h.symbolic_stats);

    h.c_row_offsets.assign(static_cast<std::size_t>(a.num_rows) + 1, 0);
    for (index_t i = 0; i < a.num_rows; ++i) {
        h.c_row_offsets[i + 1] = h.c_row_offsets[i] + row_sizes[i];
        h.max_row_size = std::max<flops_t>(h.max_row_size, row_sizes[i]);
    }
    h.avg_row_size =
        a.num_rows > 0 ? static_cast<double>(h.nnz_c()) / a.num_rows : 0.0;
    h.symbolic_stats.ms = ms_since(t_sym);

    h.numeric_choice =
        resolve_config(Phase::Numeric, b.num_cols, h.flops, h.compression, cfg, h.max_row_size);
    return h;
}

CsrMatrix numeric(const CsrMatrix& a, const CsrMatrix& b, const SpgemmHandle& handle,
                  PhaseStats* stats)
{
    if (a.num_rows != handle.m || a.num_cols != handle.n || b.num_rows != handle.n
        || b.num_cols != handle.k || a.nnz() != handle.nnz_a || b.nnz() != handle.nnz_b)
        throw ReuseError("numeric: operands do not match the symbolic handle");

    const auto t0 = Clock::now();
    CsrMatrix c;
    c.num_rows = handle.m;
    c.num_cols = handle.k;
    c.row_offsets = handle.c_row_offsets;
    c.col_indices.resize(static_cast<std::size_t>(handle.nnz_c()));
    c.values.resize(static_cast<std::size_t>(handle.nnz_c()));

    PhaseStats local;
    run_phase(a, NumericSource{b}, handle.numeric_choice, handle.config, NumericSink{c}, local);

    if (handle.config.sort_output) {
        parallel_rows(c.num_rows, std::max(handle.config.worker_count, 1),
                      handle.config.row_block, [&](int, index_t lo, index_t hi) {
                          std::vector<std::pair<index_t, double>> row;
                          for (index_t i = lo; i < hi; ++i) {
                              row.clear();
                              for (offset_t p = c.row_begin(i); p < c.row_end(i); ++p)
                                  row.emplace_back(c.col_indices[p], c.values[p]);
                              std::sort(row.begin(), row.end(),
                                        [](const auto& x, const auto& y) {
                                            return x.first < y.first;
                                        });
                              for (offset_t p = c.row_begin(i); p < c.row_end(i); ++p) {
                                  c.col_indices[p] = row[p - c.row_begin(i)].first;
                                  c.values[p] = row[p - c.row_begin(i)].second;
                              }
                          }
                      });
        c.sorted_rows = true;
    }

    local.ms = ms_since(t0);
    if (stats)
        *stats = local;
    return c;
}

MultiplyResult multiply(const CsrMatrix& a, const CsrMatrix& b, const SpgemmConfig& cfg)
{
    MultiplyResult r;
    r.handle = symbolic(a, b, cfg);
    r.c = numeric(a, b, r.handle, &r.numeric_stats);
    return r;
}

} // namespace spgemm

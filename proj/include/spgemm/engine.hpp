#ifndef SPGEMM_ENGINE_HPP
#define SPGEMM_ENGINE_HPP

#include <span>

#include "spgemm/compression.hpp"
#include "spgemm/csr_matrix.hpp"
#include "spgemm/memory_pool.hpp"

namespace spgemm {

enum class Scheme { ThreadSequential, ThreadFlatParallel };

enum class AccumulatorKind { Auto, LL, LP, Dense };

struct SpgemmConfig {
    Scheme scheme = Scheme::ThreadSequential;
    AccumulatorKind accumulator = AccumulatorKind::Auto;
    index_t l1_capacity = 0; // 0: size the level-1 accumulator for the per-row bound
    index_t dense_cutoff_k = 250'000;
    double avg_flops_cutoff = 256.0;
    double lp_max_occupancy = 0.5;
    double compression_gate = 0.15;
    CompressionMode compression = CompressionMode::Auto;
    int collapse_divisor = 8; // symbolic row-size estimate: flops / divisor
    int worker_count = 1;
    bool sort_output = false;
    index_t row_block = 512; // dynamic scheduling grain
    PoolMode pool_mode = PoolMode::One2One;
    std::int64_t pool_budget_bytes = kDefaultPoolBudgetBytes;
};

enum class Phase { Symbolic, Numeric };

// Auto choices pinned down for one phase.
struct ResolvedConfig {
    AccumulatorKind accumulator = AccumulatorKind::Dense;
    Scheme scheme = Scheme::ThreadSequential;
    index_t l1_capacity = 1;   // entries the level-1 accumulator holds
    index_t effective_k = 0;   // column domain (k/32 for compressed symbolic)
    index_t l2_capacity = 1;   // per-row bound backing pool chunk sizing
};

struct PhaseStats {
    double ms = 0.0;
    std::int64_t pool_allocations = 0;
    std::int64_t l2_inserts = 0;
};

// Output of the symbolic phase: the exact row structure of C plus the
// statistics and resolved configuration the numeric phase reuses. Valid only
// against inputs matching the recorded dimensions and nnz fingerprints.
struct SpgemmHandle {
    std::vector<offset_t> c_row_offsets;
    FlopsStats flops;
    CompressionReport compression;
    flops_t max_row_size = 0;
    double avg_row_size = 0.0;
    double avg_row_size_estimate = 0.0; // flops-based, before the symbolic phase

    ResolvedConfig symbolic_choice;
    ResolvedConfig numeric_choice;
    SpgemmConfig config;

    index_t m = 0, n = 0, k = 0;
    offset_t nnz_a = 0, nnz_b = 0;

    PhaseStats symbolic_stats;
    double compress_ms = 0.0;

    offset_t nnz_c() const { return c_row_offsets.empty() ? 0 : c_row_offsets.back(); }
};

// Meta-algorithm selection. Auto resolves to Dense when the effective column
// count is below the cutoff (the symbolic phase divides k by 32 when
// compression is applied), to LL when the average row flops are below the
// flops cutoff, and to LP with the flat-parallel scheme otherwise. Both
// cutoffs compare strictly.
ResolvedConfig resolve_config(Phase phase, index_t k, const FlopsStats& stats,
                              const CompressionReport& report, const SpgemmConfig& cfg,
                              flops_t row_upper_bound);

// Structure-only pass: exact per-row nonzero counts of C, prefix-summed into
// row offsets. No floating-point work.
SpgemmHandle symbolic(const CsrMatrix& a, const CsrMatrix& b, const SpgemmConfig& cfg = {});

// Value pass filling the preallocated structure from the handle. Entries
// whose sums cancel to exactly zero are kept so the structure stays valid
// for reuse across value changes.
CsrMatrix numeric(const CsrMatrix& a, const CsrMatrix& b, const SpgemmHandle& handle,
                  PhaseStats* stats = nullptr);

struct MultiplyResult {
    CsrMatrix c;
    SpgemmHandle handle;
    PhaseStats numeric_stats;
};

MultiplyResult multiply(const CsrMatrix& a, const CsrMatrix& b, const SpgemmConfig& cfg = {});

// Maps a flattened multiplication index to (segment, offset) through the
// prefix of source-row sizes; prefix[0] = 0 and prefix is non-decreasing.
std::pair<index_t, flops_t> flat_position(std::span<const flops_t> prefix, flops_t t);

} // namespace spgemm

#endif

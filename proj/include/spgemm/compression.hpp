#ifndef SPGEMM_COMPRESSION_HPP
#define SPGEMM_COMPRESSION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "spgemm/csr_matrix.hpp"

namespace spgemm {

// Column-set words are 32-bit so the compressed column domain is the
// original one divided by kBitsPerWord; the dense-accumulator cutoff in the
// selection heuristic relies on that exact factor.
inline constexpr index_t kBitsPerWord = 32;

// Structure-only view of a matrix with each row stored as (column-set-index,
// column-set) pairs: bit b of cs[p] set means column csi[p]*32 + b.
struct CompressedGraph {
    index_t num_rows = 0;
    index_t num_cols = 0; // original column count
    std::vector<offset_t> row_offsets;
    std::vector<index_t> csi;
    std::vector<std::uint32_t> cs;

    offset_t row_begin(index_t i) const { return row_offsets[i]; }
    offset_t row_end(index_t i) const { return row_offsets[i + 1]; }
    index_t row_size(index_t i) const
    {
        return static_cast<index_t>(row_offsets[i + 1] - row_offsets[i]);
    }
};

// Per-row count of distinct column-set indices (the compressed row sizes),
// without materializing the compressed graph. probe_count_out, when given,
// accumulates hashmap probes so the linear-time bound is assertable.
std::vector<index_t> compressed_row_sizes(const CsrMatrix& b, int worker_count = 1,
                                          std::int64_t* probe_count_out = nullptr);

CompressedGraph compress_rows(const CsrMatrix& b, int worker_count = 1);

// Column set of one compressed row, sorted ascending.
std::vector<index_t> decompress_row(const CompressedGraph& g, index_t row);

struct CompressionReport {
    double cf = 1.0;   // compressed flops / original flops
    double cmrf = 1.0; // compressed maxRowFlops / original maxRowFlops
    flops_t compressed_flops = 0;
    flops_t compressed_max_row_flops = 0;
    bool applied = false;
};

enum class CompressionMode { Auto, Always, Never };

struct CompressionDecision {
    CompressionReport report;
    std::optional<CompressedGraph> graph; // present iff report.applied
};

// Two-stage decision: compute compressed flops first, then materialize the
// compressed graph only when flops shrink by strictly more than `gate`
// (default 15%). The gate comparison is exact at ppm resolution so the
// boundary case (a reduction of exactly 15%) skips compression.
CompressionDecision decide_compression(const CsrMatrix& a, const CsrMatrix& b,
                                       const FlopsStats& stats, double gate = 0.15,
                                       CompressionMode mode = CompressionMode::Auto,
                                       int worker_count = 1);

CompressionDecision decide_compression(const CsrMatrix& a, const CsrMatrix& b);

} // namespace spgemm

#endif

#include "spgemm/compression.hpp"

#include <algorithm>
#include <cmath>

#include "spgemm/accumulators.hpp"
#include "spgemm/parallel.hpp"

namespace spgemm {

namespace {

index_t max_row_size(const CsrMatrix& m)
{
    index_t mx = 0;
    for (index_t i = 0; i < m.num_rows; ++i)
        mx = std::max(mx, m.row_size(i));
    return mx;
}

constexpr index_t kRowBlock = 512;

} // namespace

std::vector<index_t> compressed_row_sizes(const CsrMatrix& b, int worker_count,
                                          std::int64_t* probe_count_out)
{
    std::vector<index_t> sizes(static_cast<std::size_t>(b.num_rows), 0);
    const index_t cap = std::max<index_t>(max_row_size(b), 1);
    std::atomic<std::int64_t> probes{0};
    parallel_rows(b.num_rows, worker_count, kRowBlock, [&](int, index_t lo, index_t hi) {
        // distinct csi count per row; a row of length L has at most L words
        LlAccumulator<std::uint32_t> acc(cap);
        for (index_t i = lo; i < hi; ++i) {
            for (offset_t p = b.row_begin(i); p < b.row_end(i); ++p) {
                const index_t col = b.col_indices[p];
                acc.insert(col / kBitsPerWord,
                           std::uint32_t{1} << (col % kBitsPerWord), BitOrCombine{});
            }
            sizes[i] = acc.used();
            acc.reset();
        }
        probes.fetch_add(acc.probe_count());
    });
    if (probe_count_out)
        *probe_count_out += probes.load();
    return sizes;
}

CompressedGraph compress_rows(const CsrMatrix& b, int worker_count)
{
    CompressedGraph g;
    g.num_rows = b.num_rows;
    g.num_cols = b.num_cols;

    const std::vector<index_t> sizes = compressed_row_sizes(b, worker_count);
    g.row_offsets.assign(static_cast<std::size_t>(b.num_rows) + 1, 0);
    for (index_t i = 0; i < b.num_rows; ++i)
        g.row_offsets[i + 1] = g.row_offsets[i] + sizes[i];
    g.csi.resize(static_cast<std::size_t>(g.row_offsets.back()));
    g.cs.resize(static_cast<std::size_t>(g.row_offsets.back()));

    const index_t cap = std::max<index_t>(max_row_size(b), 1);
    parallel_rows(b.num_rows, worker_count, kRowBlock, [&](int, index_t lo, index_t hi) {
        LlAccumulator<std::uint32_t> acc(cap);
        for (index_t i = lo; i < hi; ++i) {
            for (offset_t p = b.row_begin(i); p < b.row_end(i); ++p) {
                const index_t col = b.col_indices[p];
                acc.insert(col / kBitsPerWord,
                           std::uint32_t{1} << (col % kBitsPerWord), BitOrCombine{});
            }
            offset_t q = g.row_offsets[i];
            acc.for_each([&](index_t key, std::uint32_t word) {
                g.csi[q] = key;
                g.cs[q] = word;
                ++q;
            });
            acc.reset();
        }
    });
    return g;
}

std::vector<index_t> decompress_row(const CompressedGraph& g, index_t row)
{
    std::vector<index_t> cols;
    for (offset_t p = g.row_begin(row); p < g.row_end(row); ++p) {
        std::uint32_t word = g.cs[p];
        while (word != 0) {
            const int bit = std::countr_zero(word);
            cols.push_back(g.csi[p] * kBitsPerWord + bit);
            word &= word - 1;
        }
    }
    std::sort(cols.begin(), cols.end());
    return cols;
}

CompressionDecision decide_compression(const CsrMatrix& a, const CsrMatrix& b,
                                       const FlopsStats& stats, double gate,
                                       CompressionMode mode, int worker_count)
{
    if (a.num_cols != b.num_rows)
        throw ContractError("decide_compression: inner dimensions do not match");

    const std::vector<index_t> sizes = compressed_row_sizes(b, worker_count);

    CompressionDecision out;
    flops_t comp_total = 0;
    flops_t comp_max = 0;
    for (index_t i = 0; i < a.num_rows; ++i) {
        flops_t f = 0;
        for (offset_t p = a.row_begin(i); p < a.row_end(i); ++p)
            f += sizes[a.col_indices[p]];
        comp_total += f;
        comp_max = std::max(comp_max, f);
    }
    out.report.compressed_flops = comp_total;
    out.report.compressed_max_row_flops = comp_max;
    out.report.cf =
        stats.total_flops > 0 ? static_cast<double>(comp_total) / stats.total_flops : 1.0;
    out.report.cmrf =
        stats.max_row_flops > 0 ? static_cast<double>(comp_max) / stats.max_row_flops : 1.0;

    bool apply = false;
    switch (mode) {
    case CompressionMode::Always:
        apply = true;
        break;
    case CompressionMode::Never:
        apply = false;
        break;
    case CompressionMode::Auto: {
        // strict: exactly `gate` reduction is not enough; exact integer
        // compare with the threshold quantized to parts per million
        const std::int64_t threshold_ppm =
            std::llround((1.0 - std::clamp(gate, 0.0, 1.0)) * 1'000'000.0);
        apply = stats.total_flops > 0
            && comp_total * 1'000'000 < stats.total_flops * threshold_ppm;
        break;
    }
    }

    out.report.applied = apply;
    if (apply)
        out.graph = compress_rows(b, worker_count);
    return out;
}

CompressionDecision decide_compression(const CsrMatrix& a, const CsrMatrix& b)
{
    return decide_compression(a, b, flops_stats(a, b));
}

} // namespace spgemm

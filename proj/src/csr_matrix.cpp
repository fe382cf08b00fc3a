#include "spgemm/csr_matrix.hpp"

#include <algorithm>
#include <limits>

namespace spgemm {

std::vector<Triplet> CsrMatrix::to_triplets() const
{
    std::vector<Triplet> out;
    out.reserve(static_cast<std::size_t>(nnz()));
    for (index_t i = 0; i < num_rows; ++i)
        for (offset_t p = row_begin(i); p < row_end(i); ++p)
            out.push_back({i, col_indices[p], values[p]});
    return out;
}

CsrMatrix build_csr(index_t num_rows, index_t num_cols, const std::vector<Triplet>& triplets)
{
    if (num_rows < 0 || num_cols < 0)
        throw ContractError("build_csr: negative dimensions");
    if (triplets.size() > static_cast<std::size_t>(std::numeric_limits<index_t>::max()))
        throw ContractError("build_csr: entry count exceeds 32-bit index range");

    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= num_rows || t.col < 0 || t.col >= num_cols)
            throw ContractError("build_csr: triplet index out of range");
    }

    CsrMatrix m;
    m.num_rows = num_rows;
    m.num_cols = num_cols;
    m.row_offsets.assign(static_cast<std::size_t>(num_rows) + 1, 0);

    for (const Triplet& t : triplets)
        ++m.row_offsets[static_cast<std::size_t>(t.row) + 1];
    for (index_t i = 0; i < num_rows; ++i)
        m.row_offsets[i + 1] += m.row_offsets[i];

    // Scatter preserves input order within a row; the stable sort below then
    // keeps duplicate summation in encounter order.
    std::vector<index_t> cols(triplets.size());
    std::vector<double> vals(triplets.size());
    {
        std::vector<offset_t> fill(m.row_offsets.begin(), m.row_offsets.end() - 1);
        for (const Triplet& t : triplets) {
            const offset_t p = fill[t.row]++;
            cols[p] = t.col;
            vals[p] = t.value;
        }
    }

    m.col_indices.reserve(cols.size());
    m.values.reserve(vals.size());
    std::vector<offset_t> perm;
    std::vector<offset_t> compacted(static_cast<std::size_t>(num_rows) + 1, 0);
    for (index_t i = 0; i < num_rows; ++i) {
        const offset_t lo = m.row_offsets[i];
        const offset_t hi = m.row_offsets[i + 1];
        perm.resize(hi - lo);
        for (offset_t p = lo; p < hi; ++p)
            perm[p - lo] = p;
        std::stable_sort(perm.begin(), perm.end(),
                         [&](offset_t x, offset_t y) { return cols[x] < cols[y]; });
        for (std::size_t q = 0; q < perm.size(); ++q) {
            const index_t c = cols[perm[q]];
            const double v = vals[perm[q]];
            if (q > 0 && cols[perm[q - 1]] == c)
                m.values.back() += v;
            else {
                m.col_indices.push_back(c);
                m.values.push_back(v);
            }
        }
        compacted[i + 1] = static_cast<offset_t>(m.col_indices.size());
    }
    m.row_offsets = std::move(compacted);
    m.sorted_rows = true;
    return m;
}

CsrMatrix transpose(const CsrMatrix& m)
{
    CsrMatrix t;
    t.num_rows = m.num_cols;
    t.num_cols = m.num_rows;
    t.row_offsets.assign(static_cast<std::size_t>(t.num_rows) + 1, 0);
    t.col_indices.resize(static_cast<std::size_t>(m.nnz()));
    t.values.resize(static_cast<std::size_t>(m.nnz()));

    for (offset_t p = 0; p < m.nnz(); ++p)
        ++t.row_offsets[static_cast<std::size_t>(m.col_indices[p]) + 1];
    for (index_t i = 0; i < t.num_rows; ++i)
        t.row_offsets[i + 1] += t.row_offsets[i];

    std::vector<offset_t> fill(t.row_offsets.begin(), t.row_offsets.end() - 1);
    for (index_t i = 0; i < m.num_rows; ++i) {
        for (offset_t p = m.row_begin(i); p < m.row_end(i); ++p) {
            const offset_t q = fill[m.col_indices[p]]++;
            t.col_indices[q] = i;
            t.values[q] = m.values[p];
        }
    }
    // Source rows are visited in ascending order, so each output row is
    // sorted by construction.
    t.sorted_rows = true;
    return t;
}

void sort_rows(CsrMatrix& m)
{
    std::vector<std::pair<index_t, double>> row;
    for (index_t i = 0; i < m.num_rows; ++i) {
        const offset_t lo = m.row_begin(i);
        const offset_t hi = m.row_end(i);
        row.clear();
        for (offset_t p = lo; p < hi; ++p)
            row.emplace_back(m.col_indices[p], m.values[p]);
        std::sort(row.begin(), row.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (offset_t p = lo; p < hi; ++p) {
            m.col_indices[p] = row[p - lo].first;
            m.values[p] = row[p - lo].second;
        }
    }
    m.sorted_rows = true;
}

bool csr_exactly_equal(const CsrMatrix& a, const CsrMatrix& b)
{
    return a.num_rows == b.num_rows && a.num_cols == b.num_cols
        && a.row_offsets == b.row_offsets && a.col_indices == b.col_indices
        && a.values == b.values;
}

FlopsStats flops_stats(const CsrMatrix& a, const CsrMatrix& b)
{
    if (a.num_cols != b.num_rows)
        throw ContractError("flops_stats: inner dimensions do not match");

    FlopsStats s;
    s.per_row_flops.assign(static_cast<std::size_t>(a.num_rows), 0);
    for (index_t i = 0; i < a.num_rows; ++i) {
        flops_t f = 0;
        for (offset_t p = a.row_begin(i); p < a.row_end(i); ++p)
            f += b.row_size(a.col_indices[p]);
        s.per_row_flops[i] = f;
        s.total_flops += f;
        s.max_row_flops = std::max(s.max_row_flops, f);
    }
    s.avg_degree_a = a.num_cols > 0 ? static_cast<double>(a.nnz()) / a.num_cols : 0.0;
    s.avg_row_flops = a.num_rows > 0 ? static_cast<double>(s.total_flops) / a.num_rows : 0.0;
    return s;
}

} // namespace spgemm

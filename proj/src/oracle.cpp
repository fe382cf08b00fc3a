#include "spgemm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spgemm {

GustavsonResult gustavson_serial(const CsrMatrix& a, const CsrMatrix& b)
{
    if (a.num_cols != b.num_rows)
        throw ContractError("gustavson_serial: inner dimensions do not match");

    GustavsonResult res;
    res.c.num_rows = a.num_rows;
    res.c.num_cols = b.num_cols;
    res.c.rows.resize(static_cast<std::size_t>(a.num_rows));

    std::vector<double> scratch(static_cast<std::size_t>(b.num_cols), 0.0);
    std::vector<char> present(static_cast<std::size_t>(b.num_cols), 0);
    std::vector<index_t> touched;

    for (index_t i = 0; i < a.num_rows; ++i) {
        touched.clear();
        for (offset_t p = a.row_begin(i); p < a.row_end(i); ++p) {
            const index_t j = a.col_indices[p];
            const double av = a.values[p];
            for (offset_t q = b.row_begin(j); q < b.row_end(j); ++q) {
                const index_t c = b.col_indices[q];
                scratch[c] += av * b.values[q];
                ++res.multiplications;
                if (!present[c]) {
                    present[c] = 1;
                    touched.push_back(c);
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        auto& row = res.c.rows[i];
        row.reserve(touched.size());
        for (index_t c : touched) {
            row.emplace_back(c, scratch[c]);
            scratch[c] = 0.0;
            present[c] = 0;
        }
    }
    return res;
}

CanonicalC dense_triple_loop(const CsrMatrix& a, const CsrMatrix& b)
{
    if (a.num_cols != b.num_rows)
        throw ContractError("dense_triple_loop: inner dimensions do not match");
    if (a.num_rows > kDenseOracleDimLimit || a.num_cols > kDenseOracleDimLimit
        || b.num_cols > kDenseOracleDimLimit)
        throw ContractError("dense_triple_loop: dimensions exceed the dense oracle guard");

    const std::size_t m = static_cast<std::size_t>(a.num_rows);
    const std::size_t n = static_cast<std::size_t>(a.num_cols);
    const std::size_t k = static_cast<std::size_t>(b.num_cols);

    std::vector<double> da(m * n, 0.0), db(n * k, 0.0);
    std::vector<char> pa(m * n, 0), pb(n * k, 0);
    for (index_t i = 0; i < a.num_rows; ++i)
        for (offset_t p = a.row_begin(i); p < a.row_end(i); ++p) {
            da[i * n + a.col_indices[p]] = a.values[p];
            pa[i * n + a.col_indices[p]] = 1;
        }
    for (index_t i = 0; i < b.num_rows; ++i)
        for (offset_t p = b.row_begin(i); p < b.row_end(i); ++p) {
            db[i * k + b.col_indices[p]] = b.values[p];
            pb[i * k + b.col_indices[p]] = 1;
        }

    CanonicalC out;
    out.num_rows = a.num_rows;
    out.num_cols = b.num_cols;
    out.rows.resize(m);

    std::vector<double> val(k);
    std::vector<char> pat(k);
    for (std::size_t i = 0; i < m; ++i) {
        std::fill(val.begin(), val.end(), 0.0);
        std::fill(pat.begin(), pat.end(), 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (!pa[i * n + j])
                continue;
            const double av = da[i * n + j];
            for (std::size_t c = 0; c < k; ++c) {
                if (pb[j * k + c]) {
                    // structural presence, independent of value cancellation
                    val[c] += av * db[j * k + c];
                    pat[c] = 1;
                }
            }
        }
        auto& row = out.rows[i];
        for (std::size_t c = 0; c < k; ++c)
            if (pat[c])
                row.emplace_back(static_cast<index_t>(c), val[c]);
    }
    return out;
}

CanonicalC canonicalize(const CsrMatrix& m)
{
    CanonicalC out;
    out.num_rows = m.num_rows;
    out.num_cols = m.num_cols;
    out.rows.resize(static_cast<std::size_t>(m.num_rows));
    for (index_t i = 0; i < m.num_rows; ++i) {
        auto& row = out.rows[i];
        row.reserve(static_cast<std::size_t>(m.row_size(i)));
        for (offset_t p = m.row_begin(i); p < m.row_end(i); ++p)
            row.emplace_back(m.col_indices[p], m.values[p]);
        std::sort(row.begin(), row.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
    }
    return out;
}

CompareResult compare_canonical(const CanonicalC& expected, const CanonicalC& actual)
{
    CompareResult r;
    if (expected.num_rows != actual.num_rows || expected.num_cols != actual.num_cols
        || expected.rows.size() != actual.rows.size()) {
        r.max_rel_error = std::numeric_limits<double>::infinity();
        return r;
    }
    for (std::size_t i = 0; i < expected.rows.size(); ++i) {
        const auto& er = expected.rows[i];
        const auto& ar = actual.rows[i];
        if (er.size() != ar.size()) {
            r.max_rel_error = std::numeric_limits<double>::infinity();
            r.first_bad_row = static_cast<index_t>(i);
            r.first_bad_col = er.size() < ar.size() ? ar[er.size()].first : er[ar.size()].first;
            return r;
        }
        for (std::size_t q = 0; q < er.size(); ++q) {
            if (er[q].first != ar[q].first) {
                r.max_rel_error = std::numeric_limits<double>::infinity();
                r.first_bad_row = static_cast<index_t>(i);
                r.first_bad_col = ar[q].first;
                return r;
            }
            const double e = er[q].second;
            const double v = ar[q].second;
            const double denom = std::max(std::fabs(e), std::fabs(v));
            const double err = denom == 0.0 ? 0.0 : std::fabs(e - v) / denom;
            if (err > r.max_rel_error) {
                r.max_rel_error = err;
                r.first_bad_row = static_cast<index_t>(i);
                r.first_bad_col = ar[q].first;
            }
        }
    }
    r.structure_equal = true;
    return r;
}

} // namespace spgemm

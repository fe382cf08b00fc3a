#ifndef SPGEMM_ORACLE_HPP
#define SPGEMM_ORACLE_HPP

#include <utility>
#include <vector>

#include "spgemm/csr_matrix.hpp"

namespace spgemm {

// Reference results in canonical form: rows sorted ascending by column, no
// duplicate columns. Only meant for small problems; the `verify` command and
// the test suites compare engine output against these.
struct CanonicalC {
    index_t num_rows = 0;
    index_t num_cols = 0;
    std::vector<std::vector<std::pair<index_t, double>>> rows;

    offset_t nnz() const
    {
        offset_t n = 0;
        for (const auto& r : rows)
            n += static_cast<offset_t>(r.size());
        return n;
    }
};

struct GustavsonResult {
    CanonicalC c;
    flops_t multiplications = 0; // scalar multiplies executed
};

// Single-threaded row-wise reference multiply with a dense scratch row.
// Structural zeros (cancelled sums) are kept.
GustavsonResult gustavson_serial(const CsrMatrix& a, const CsrMatrix& b);

// Independent second oracle: materializes both operands densely and runs the
// classic triple loop. Guarded to dimensions <= kDenseOracleDimLimit.
inline constexpr index_t kDenseOracleDimLimit = 2000;
CanonicalC dense_triple_loop(const CsrMatrix& a, const CsrMatrix& b);

CanonicalC canonicalize(const CsrMatrix& m);

struct CompareResult {
    bool structure_equal = false;
    double max_rel_error = 0.0; // infinity when structures differ
    index_t first_bad_row = -1;
    index_t first_bad_col = -1;
};

// Entrywise comparison; relative error uses max(|expected|, |actual|) as the
// denominator and is zero when both values are zero.
CompareResult compare_canonical(const CanonicalC& expected, const CanonicalC& actual);

} // namespace spgemm

#endif

#ifndef SPGEMM_CSR_MATRIX_HPP
#define SPGEMM_CSR_MATRIX_HPP

#include <vector>

#include "spgemm/common.hpp"

namespace spgemm {

struct Triplet {
    index_t row;
    index_t col;
    double value;
};

// Compressed-row matrix. Immutable after construction and safe to share
// across workers. Column order within a row is not assumed sorted;
// `sorted_rows` records whether rows happen to be sorted.
struct CsrMatrix {
    index_t num_rows = 0;
    index_t num_cols = 0;
    std::vector<offset_t> row_offsets; // length num_rows + 1
    std::vector<index_t> col_indices;  // length nnz, unique within a row
    std::vector<double> values;        // length nnz
    bool sorted_rows = false;

    offset_t nnz() const { return row_offsets.empty() ? 0 : row_offsets.back(); }
    offset_t row_begin(index_t i) const { return row_offsets[i]; }
    offset_t row_end(index_t i) const { return row_offsets[i + 1]; }
    index_t row_size(index_t i) const
    {
        return static_cast<index_t>(row_offsets[i + 1] - row_offsets[i]);
    }

    std::vector<Triplet> to_triplets() const;
};

// Builds a CSR matrix from triplets; duplicates coalesce by summation and
// rows come out column-sorted. Out-of-range indices raise ContractError.
CsrMatrix build_csr(index_t num_rows, index_t num_cols, const std::vector<Triplet>& triplets);

CsrMatrix transpose(const CsrMatrix& m);

// In-place per-row column sort (the optional post-processing pass for
// consumers that need sorted output).
void sort_rows(CsrMatrix& m);

bool csr_exactly_equal(const CsrMatrix& a, const CsrMatrix& b);

struct FlopsStats {
    std::vector<flops_t> per_row_flops; // length m
    flops_t total_flops = 0;
    flops_t max_row_flops = 0;
    double avg_degree_a = 0.0; // nnz(A) / A.num_cols
    double avg_row_flops = 0.0;
};

// Multiplication counts for C = A*B: per_row_flops[i] is the sum of the
// sizes of all rows of B referenced by A(i,:).
FlopsStats flops_stats(const CsrMatrix& a, const CsrMatrix& b);

} // namespace spgemm

#endif

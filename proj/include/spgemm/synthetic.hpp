#ifndef SPGEMM_SYNTHETIC_HPP
#define SPGEMM_SYNTHETIC_HPP

#include <cstdint>

#include "spgemm/csr_matrix.hpp"

namespace spgemm {

enum class SyntheticKind {
    UniformRandom, // ~target columns per row, drawn uniformly
    Banded,        // dense band of ~target columns centered on the diagonal
    Skewed,        // heavy-tailed row sizes, emulating graph matrices
};

// Deterministic for a fixed seed. target_nnz_per_row must not exceed cols.
CsrMatrix generate_synthetic(SyntheticKind kind, index_t rows, index_t cols,
                             index_t target_nnz_per_row, std::uint64_t seed);

} // namespace spgemm

#endif

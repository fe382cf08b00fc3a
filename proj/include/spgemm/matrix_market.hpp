#ifndef SPGEMM_MATRIX_MARKET_HPP
#define SPGEMM_MATRIX_MARKET_HPP

#include <string>

#include "spgemm/csr_matrix.hpp"

namespace spgemm {

// Pre-processing applied while loading, so callers can report it.
struct MatrixMarketInfo {
    std::string field;            // real | integer | pattern
    std::string symmetry;         // general | symmetric
    offset_t declared_entries = 0;
    bool expanded_symmetric = false;
    bool coalesced_duplicates = false; // stored nnz < scattered entry count
};

// Reads a coordinate-format MatrixMarket file (real or pattern field,
// general or symmetric symmetry). Symmetric inputs are expanded to full
// storage; pattern entries get value 1.0; duplicates coalesce by summation.
CsrMatrix read_matrix_market(const std::string& path, MatrixMarketInfo* info = nullptr);

// Writes coordinate `real general` with 17 significant digits, 1-based.
void write_matrix_market(const CsrMatrix& m, const std::string& path);

} // namespace spgemm

#endif

#ifndef SPGEMM_COMMON_HPP
#define SPGEMM_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spgemm {

// Row/column indices are 32-bit; construction rejects matrices whose nnz
// would not fit. Flop and nnz counters are 64-bit.
using index_t = std::int32_t;
using offset_t = std::int64_t;
using flops_t = std::int64_t;

class SpgemmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition or API misuse.
class ContractError : public SpgemmError {
public:
    using SpgemmError::SpgemmError;
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public SpgemmError {
public:
    ParseError(const std::string& what, long line)
        : SpgemmError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class IoError : public SpgemmError {
public:
    using SpgemmError::SpgemmError;
};

// Numeric-phase handle does not match the supplied operands.
class ReuseError : public SpgemmError {
public:
    using SpgemmError::SpgemmError;
};

class PoolSizingError : public SpgemmError {
public:
    using SpgemmError::SpgemmError;
};

} // namespace spgemm

#endif

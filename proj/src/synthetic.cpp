#include "spgemm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace spgemm {

namespace {

// Pareto multiplier with unit mean (shape 1.5, scale 1/3); the tail makes a
// few rows much longer than the target.
double heavy_tail(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double x = u(rng);
    while (x == 0.0)
        x = u(rng);
    return (1.0 / 3.0) / std::pow(x, 1.0 / 1.5);
}

} // namespace

CsrMatrix generate_synthetic(SyntheticKind kind, index_t rows, index_t cols,
                             index_t target_nnz_per_row, std::uint64_t seed)
{
    if (rows < 1 || cols < 1)
        throw ContractError("generate_synthetic: rows and cols must be >= 1");
    if (target_nnz_per_row < 0 || target_nnz_per_row > cols)
        throw ContractError("generate_synthetic: target_nnz_per_row exceeds cols");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
    std::uniform_int_distribution<index_t> col_dist(0, cols - 1);

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(rows) * std::max<index_t>(target_nnz_per_row, 1));
    std::vector<index_t> row_cols;

    for (index_t i = 0; i < rows; ++i) {
        row_cols.clear();
        switch (kind) {
        case SyntheticKind::UniformRandom:
            for (index_t t = 0; t < target_nnz_per_row; ++t)
                row_cols.push_back(col_dist(rng));
            break;
        case SyntheticKind::Banded: {
            // window of exactly target columns containing the diagonal
            if (target_nnz_per_row > 0) {
                index_t lo = i - (target_nnz_per_row - 1) / 2;
                lo = std::clamp<index_t>(lo, 0, std::max<index_t>(0, cols - target_nnz_per_row));
                const index_t hi = std::min<index_t>(cols - 1, lo + target_nnz_per_row - 1);
                for (index_t c = lo; c <= hi; ++c)
                    row_cols.push_back(c);
            }
            break;
        }
        case SyntheticKind::Skewed: {
            const double want = target_nnz_per_row * heavy_tail(rng);
            const index_t n =
                std::clamp<index_t>(static_cast<index_t>(std::llround(want)), 1, cols);
            for (index_t t = 0; t < n; ++t)
                row_cols.push_back(col_dist(rng));
            break;
        }
        }
        std::sort(row_cols.begin(), row_cols.end());
        row_cols.erase(std::unique(row_cols.begin(), row_cols.end()), row_cols.end());
        for (index_t c : row_cols)
            triplets.push_back({i, c, value_dist(rng)});
    }

    return build_csr(rows, cols, triplets);
}

} // namespace spgemm

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "spgemm/matrix_market.hpp"
#include "spgemm/oracle.hpp"
#include "test_util.hpp"

using namespace spgemm;

namespace {

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path);
    out << content;
}

} // namespace

TEST_CASE("build_csr coalesces duplicates by summation")
{
    const CsrMatrix m = build_csr(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}});
    CHECK(m.nnz() == 1);
    CHECK(m.values[0] == doctest::Approx(3.0));
}

TEST_CASE("build_csr handles an empty matrix")
{
    const CsrMatrix m = build_csr(2, 2, {});
    CHECK(m.row_offsets == std::vector<offset_t>{0, 0, 0});
    CHECK(m.nnz() == 0);
}

TEST_CASE("build_csr row offsets")
{
    const CsrMatrix m =
        build_csr(3, 3, {{0, 0, 1}, {0, 2, 2}, {1, 1, 3}, {2, 0, 4}, {2, 2, 5}});
    CHECK(m.row_offsets == std::vector<offset_t>{0, 2, 3, 5});
    CHECK(m.sorted_rows);
}

TEST_CASE("build_csr rejects out-of-range indices")
{
    CHECK_THROWS_AS(build_csr(2, 2, {{2, 0, 1.0}}), ContractError);
    CHECK_THROWS_AS(build_csr(2, 2, {{0, 2, 1.0}}), ContractError);
    CHECK_THROWS_AS(build_csr(2, 2, {{-1, 0, 1.0}}), ContractError);
}

TEST_CASE("canonical round-trip through triplets")
{
    std::mt19937_64 rng(11);
    for (int it = 0; it < 20; ++it) {
        const CsrMatrix m = test::random_csr(rng, 40, 37, 0.1);
        const CsrMatrix again = build_csr(m.num_rows, m.num_cols, m.to_triplets());
        CHECK(csr_exactly_equal(m, again));
    }
}

TEST_CASE("transpose basics")
{
    const CsrMatrix eye = build_csr(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
    CHECK(csr_exactly_equal(transpose(eye), eye));

    const CsrMatrix m = build_csr(2, 3, {{0, 2, 7.0}});
    const CsrMatrix t = transpose(m);
    CHECK(t.num_rows == 3);
    CHECK(t.num_cols == 2);
    CHECK(t.row_size(2) == 1);
    CHECK(t.col_indices[0] == 0);
    CHECK(t.values[0] == doctest::Approx(7.0));
}

TEST_CASE("transpose is an involution and preserves the value multiset")
{
    std::mt19937_64 rng(5);
    for (int it = 0; it < 10; ++it) {
        const CsrMatrix m = test::random_csr(rng, 30, 45, 0.08);
        const CsrMatrix tt = transpose(transpose(m));
        CHECK(csr_exactly_equal(m, tt));

        const CsrMatrix t = transpose(m);
        CHECK(t.nnz() == m.nnz());
        std::vector<double> va = m.values, vb = t.values;
        std::sort(va.begin(), va.end());
        std::sort(vb.begin(), vb.end());
        CHECK(va == vb);
    }
}

TEST_CASE("flops_stats sums contributing row sizes")
{
    // A row 0 references B rows {0,1} with sizes {2,3}
    const CsrMatrix a = build_csr(2, 2, {{0, 0, 1}, {0, 1, 1}});
    const CsrMatrix b = build_csr(2, 4, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {1, 3, 1}});
    const FlopsStats s = flops_stats(a, b);
    CHECK(s.per_row_flops[0] == 5);
    CHECK(s.per_row_flops[1] == 0); // empty row of A
    CHECK(s.total_flops == 5);
    CHECK(s.max_row_flops == 5);
}

TEST_CASE("flops_stats rejects dimension mismatch")
{
    const CsrMatrix a = build_csr(2, 3, {});
    const CsrMatrix b = build_csr(2, 2, {});
    CHECK_THROWS_AS(flops_stats(a, b), ContractError);
}

TEST_CASE("flops_stats matches the serial oracle multiplication count")
{
    std::mt19937_64 rng(17);
    for (int it = 0; it < 10; ++it) {
        const CsrMatrix a = test::random_csr(rng, 50, 40, 0.1);
        const CsrMatrix b = test::random_csr(rng, 40, 60, 0.1);
        CHECK(flops_stats(a, b).total_flops == gustavson_serial(a, b).multiplications);
    }
}

TEST_CASE("matrix market reads an identity")
{
    const std::string path = temp_path("spgemm_mm_identity.mtx");
    write_file(path, "%%MatrixMarket matrix coordinate real general\n"
                     "2 2 2\n1 1 1.0\n2 2 1.0\n");
    const CsrMatrix m = read_matrix_market(path);
    CHECK(m.nnz() == 2);
    CHECK(m.values == std::vector<double>{1.0, 1.0});
}

TEST_CASE("matrix market expands symmetric storage")
{
    const std::string path = temp_path("spgemm_mm_sym.mtx");
    write_file(path, "%%MatrixMarket matrix coordinate real symmetric\n"
                     "% comment line\n"
                     "3 3 3\n1 1 2.0\n2 1 -1.0\n3 2 4.0\n");
    const CsrMatrix m = read_matrix_market(path);
    CHECK(m.nnz() == 5); // 1 diagonal + 2 stored off-diagonals mirrored
    offset_t off_diag = 0;
    for (index_t i = 0; i < m.num_rows; ++i)
        for (offset_t p = m.row_begin(i); p < m.row_end(i); ++p)
            if (m.col_indices[p] != i)
                ++off_diag;
    CHECK(off_diag == 4);
}

TEST_CASE("matrix market promotes pattern entries to 1.0")
{
    const std::string path = temp_path("spgemm_mm_pattern.mtx");
    write_file(path, "%%MatrixMarket matrix coordinate pattern general\n"
                     "4 4 5\n1 1\n1 2\n2 3\n3 4\n4 4\n");
    const CsrMatrix m = read_matrix_market(path);
    CHECK(m.nnz() == 5);
    for (double v : m.values)
        CHECK(v == 1.0);
}

TEST_CASE("matrix market errors carry line numbers")
{
    const std::string bad_header = temp_path("spgemm_mm_bad_header.mtx");
    write_file(bad_header, "%%MatrixMarket matrix array real general\n2 2\n");
    CHECK_THROWS_WITH_AS(read_matrix_market(bad_header),
                         doctest::Contains("line 1"), ParseError);

    const std::string overflow = temp_path("spgemm_mm_overflow.mtx");
    write_file(overflow, "%%MatrixMarket matrix coordinate real general\n"
                         "3000000000 2 1\n1 1 1.0\n");
    CHECK_THROWS_WITH_AS(read_matrix_market(overflow),
                         doctest::Contains("line 2"), ParseError);

    const std::string bad_index = temp_path("spgemm_mm_bad_index.mtx");
    write_file(bad_index, "%%MatrixMarket matrix coordinate real general\n"
                          "2 2 1\n3 1 1.0\n");
    CHECK_THROWS_WITH_AS(read_matrix_market(bad_index),
                         doctest::Contains("line 3"), ParseError);
}

TEST_CASE("matrix market write-then-read round-trips exactly")
{
    std::mt19937_64 rng(23);
    const CsrMatrix m = test::random_csr(rng, 25, 30, 0.15);
    const std::string path = temp_path("spgemm_mm_roundtrip.mtx");
    write_matrix_market(m, path);
    const CsrMatrix again = read_matrix_market(path);
    CHECK(csr_exactly_equal(m, again)); // 17 significant digits round-trip doubles
}

TEST_CASE("generate_synthetic is deterministic per seed")
{
    const CsrMatrix a = generate_synthetic(SyntheticKind::Banded, 100, 100, 5, 1);
    const CsrMatrix b = generate_synthetic(SyntheticKind::Banded, 100, 100, 5, 1);
    CHECK(csr_exactly_equal(a, b));
}

TEST_CASE("generate_synthetic uniform nnz lands near the target")
{
    const CsrMatrix m = generate_synthetic(SyntheticKind::UniformRandom, 1000, 1000, 8, 7);
    CHECK(m.nnz() >= 7000);
    CHECK(m.nnz() <= 9000);
}

TEST_CASE("generate_synthetic banded rows stay within the band")
{
    const CsrMatrix m = generate_synthetic(SyntheticKind::Banded, 10, 10, 3, 42);
    for (index_t i = 0; i < m.num_rows; ++i) {
        index_t lo = m.num_cols, hi = -1;
        for (offset_t p = m.row_begin(i); p < m.row_end(i); ++p) {
            lo = std::min(lo, m.col_indices[p]);
            hi = std::max(hi, m.col_indices[p]);
        }
        if (m.row_size(i) > 0)
            CHECK(hi - lo + 1 <= 7);
    }
}

TEST_CASE("generate_synthetic skewed rows are heavy-tailed")
{
    const CsrMatrix m = generate_synthetic(SyntheticKind::Skewed, 5000, 5000, 12, 3);
    index_t max_row = 0;
    for (index_t i = 0; i < m.num_rows; ++i)
        max_row = std::max(max_row, m.row_size(i));
    const double mean = static_cast<double>(m.nnz()) / m.num_rows;
    CHECK(max_row > 4.0 * mean);
}

TEST_CASE("generate_synthetic rejects an oversized target")
{
    CHECK_THROWS_AS(generate_synthetic(SyntheticKind::UniformRandom, 4, 4, 5, 0),
                    ContractError);
}

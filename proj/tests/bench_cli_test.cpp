#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "spgemm/bench.hpp"
#include "spgemm/cli.hpp"
#include "spgemm/matrix_market.hpp"

using namespace spgemm;

namespace {

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

BenchRecord record(const std::string& problem, const std::string& algo, double t)
{
    BenchRecord r;
    r.problem = problem;
    r.algorithm = algo;
    r.scheme = "seq";
    r.t_total_ms = t;
    return r;
}

} // namespace

TEST_CASE("bench csv round-trips")
{
    std::vector<BenchRecord> rows;
    BenchRecord r = record("p1", "auto", 12.5);
    r.m = 100;
    r.flops = 1234;
    r.cf = 0.71;
    r.reuse = true;
    r.reps = 5;
    rows.push_back(r);
    const std::string path = temp_path("spgemm_bench_roundtrip.csv");
    write_bench_csv(path, rows);
    const auto again = read_bench_csv(path);
    REQUIRE(again.size() == 1);
    CHECK(again[0].problem == "p1");
    CHECK(again[0].algorithm == "auto");
    CHECK(again[0].flops == 1234);
    CHECK(again[0].cf == doctest::Approx(0.71));
    CHECK(again[0].reuse);
    CHECK(again[0].reps == 5);
}

TEST_CASE("profile: the best method counts everything at x=1")
{
    std::vector<BenchRecord> rows;
    for (int p = 0; p < 4; ++p) {
        rows.push_back(record("p" + std::to_string(p), "fast", 10.0));
        rows.push_back(record("p" + std::to_string(p), "slow", 15.0 + p));
    }
    const PerformanceProfile profile = compute_profile(rows, 10);
    const std::size_t fast =
        std::find(profile.methods.begin(), profile.methods.end(), "fast")
        - profile.methods.begin();
    CHECK(profile.x.front() == 1.0);
    CHECK(profile.counts[fast].front() == 4);
    CHECK(profile.counts[fast].back() == 4);
}

TEST_CASE("profile: a uniformly 2x slower method jumps at x=2")
{
    std::vector<BenchRecord> rows;
    for (int p = 0; p < 5; ++p) {
        rows.push_back(record("p" + std::to_string(p), "a", 10.0));
        rows.push_back(record("p" + std::to_string(p), "b", 20.0));
    }
    const PerformanceProfile profile = compute_profile(rows, 3); // x = {1, sqrt(2), 2}
    const std::size_t b =
        std::find(profile.methods.begin(), profile.methods.end(), "b")
        - profile.methods.begin();
    CHECK(profile.x.back() == doctest::Approx(2.0));
    CHECK(profile.counts[b][0] == 0);
    CHECK(profile.counts[b][1] == 0);
    CHECK(profile.counts[b][2] == 5);
}

TEST_CASE("profile: hand-built three-problem step function")
{
    // method A: 10,10,10; method B: 10,20,40 -> ratios 1,2,4
    std::vector<BenchRecord> rows = {
        record("p1", "A", 10.0), record("p2", "A", 10.0), record("p3", "A", 10.0),
        record("p1", "B", 10.0), record("p2", "B", 20.0), record("p3", "B", 40.0),
    };
    const PerformanceProfile profile = compute_profile(rows, 3); // x = {1, 2, 4}
    REQUIRE(profile.x.size() == 3);
    CHECK(profile.x[0] == 1.0);
    CHECK(profile.x[1] == doctest::Approx(2.0));
    CHECK(profile.x[2] == doctest::Approx(4.0));

    const std::size_t ia =
        std::find(profile.methods.begin(), profile.methods.end(), "A")
        - profile.methods.begin();
    const std::size_t ib =
        std::find(profile.methods.begin(), profile.methods.end(), "B")
        - profile.methods.begin();
    CHECK(profile.counts[ia] == std::vector<int>{3, 3, 3});
    CHECK(profile.counts[ib] == std::vector<int>{1, 2, 3});
}

TEST_CASE("profile: a method missing a problem never counts it")
{
    std::vector<BenchRecord> rows = {
        record("p1", "a", 10.0), record("p2", "a", 10.0),
        record("p1", "b", 10.0), // b failed p2
    };
    const PerformanceProfile profile = compute_profile(rows, 5);
    const std::size_t b =
        std::find(profile.methods.begin(), profile.methods.end(), "b")
        - profile.methods.begin();
    CHECK(profile.counts[b].back() == 1);
}

TEST_CASE("profile rejects fewer than two methods")
{
    std::vector<BenchRecord> rows = {record("p1", "only", 10.0)};
    CHECK_THROWS_AS(compute_profile(rows, 5), ContractError);
}

TEST_CASE("cli gen is byte-deterministic")
{
    const std::string out1 = temp_path("spgemm_gen_a.mtx");
    const std::string out2 = temp_path("spgemm_gen_b.mtx");
    CHECK(run_cli({"gen", "--kind", "banded", "--rows", "1000", "--nnz", "7", "--seed", "3",
                   "--out", out1})
          == kExitOk);
    CHECK(run_cli({"gen", "--kind", "banded", "--rows", "1000", "--nnz", "7", "--seed", "3",
                   "--out", out2})
          == kExitOk);
    CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("cli gen rejects zero rows with a usage error")
{
    CHECK(run_cli({"gen", "--kind", "uniform-random", "--rows", "0", "--out",
                   temp_path("spgemm_gen_bad.mtx")})
          == kExitUsage);
}

TEST_CASE("cli bench writes the expected record shape")
{
    const std::string mtx = temp_path("spgemm_bench_in.mtx");
    REQUIRE(run_cli({"gen", "--kind", "uniform-random", "--rows", "120", "--nnz", "5",
                     "--seed", "5", "--out", mtx})
            == kExitOk);

    const std::string out = temp_path("spgemm_bench_out.csv");
    CHECK(run_cli({"bench", "--a", mtx, "--b", mtx, "--mode", "auto", "--threads", "2",
                   "--reps", "3", "--reuse", "4", "--out", out})
          == kExitOk);

    const auto rows = read_bench_csv(out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].reps == 3);
    CHECK_FALSE(rows[0].reuse);
    CHECK(rows[0].t_total_ms >= rows[0].t_symbolic_ms + rows[0].t_numeric_ms);
    CHECK(rows[1].reuse);
    CHECK(rows[1].reps == 4);
    CHECK(rows[1].t_symbolic_ms == 0.0);
    CHECK(rows[1].t_compress_ms == 0.0);
    CHECK(rows[1].nnz_c == rows[0].nnz_c);
}

TEST_CASE("structural columns are deterministic across worker counts")
{
    const std::string mtx = temp_path("spgemm_struct_in.mtx");
    REQUIRE(run_cli({"gen", "--kind", "skewed", "--rows", "200", "--nnz", "6", "--seed", "8",
                     "--out", mtx})
            == kExitOk);
    const std::string out1 = temp_path("spgemm_struct_t1.csv");
    const std::string out4 = temp_path("spgemm_struct_t4.csv");
    REQUIRE(run_cli({"bench", "--a", mtx, "--b", mtx, "--threads", "1", "--reps", "1", "--out",
                     out1})
            == kExitOk);
    REQUIRE(run_cli({"bench", "--a", mtx, "--b", mtx, "--threads", "4", "--reps", "1", "--out",
                     out4})
            == kExitOk);
    const BenchRecord r1 = read_bench_csv(out1).at(0);
    const BenchRecord r4 = read_bench_csv(out4).at(0);
    CHECK(r1.flops == r4.flops);
    CHECK(r1.max_row_flops == r4.max_row_flops);
    CHECK(r1.nnz_c == r4.nnz_c);
    CHECK(r1.max_row_size == r4.max_row_size);
    CHECK(r1.cf == r4.cf);
    CHECK(r1.cmrf == r4.cmrf);
}

TEST_CASE("cli bench triple emits two chained problems")
{
    const std::string a = temp_path("spgemm_triple_a.mtx");
    const std::string p = temp_path("spgemm_triple_p.mtx");
    REQUIRE(run_cli({"gen", "--kind", "banded", "--rows", "80", "--nnz", "5", "--seed", "1",
                     "--out", a})
            == kExitOk);
    REQUIRE(run_cli({"gen", "--kind", "banded", "--rows", "80", "--cols", "20", "--nnz", "2",
                     "--seed", "2", "--out", p})
            == kExitOk);
    // restriction = transpose of p, written through the library
    const CsrMatrix rp = transpose(read_matrix_market(p));
    const std::string r = temp_path("spgemm_triple_r.mtx");
    write_matrix_market(rp, r);

    const std::string out = temp_path("spgemm_triple_out.csv");
    CHECK(run_cli({"bench", "--triple", "--r", r, "--a", a, "--p", p, "--reps", "2", "--out",
                   out})
          == kExitOk);
    const auto rows = read_bench_csv(out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].problem.find("_AxP") != std::string::npos);
    CHECK(rows[1].problem.find("_RxAP") != std::string::npos);
    CHECK(rows[1].m == 20);
    CHECK(rows[1].k == 20);
}

TEST_CASE("cli verify passes on a clean engine and fails when corrupted")
{
    const std::string mtx = temp_path("spgemm_verify_in.mtx");
    REQUIRE(run_cli({"gen", "--kind", "uniform-random", "--rows", "300", "--nnz", "15",
                     "--seed", "9", "--out", mtx})
            == kExitOk);
    CHECK(run_cli({"verify", "--a", mtx, "--b", mtx, "--threads", "2"}) == kExitOk);
    CHECK(run_cli({"verify", "--a", mtx, "--b", mtx, "--inject-error"}) == kExitVerifyFailed);
}

TEST_CASE("cli reports io errors for missing files")
{
    CHECK(run_cli({"bench", "--a", "/nonexistent/x.mtx", "--b", "/nonexistent/y.mtx", "--out",
                   temp_path("spgemm_never.csv")})
          == kExitIo);
}

TEST_CASE("cli profile composes with bench output")
{
    std::vector<BenchRecord> rows = {
        record("p1", "A", 10.0), record("p2", "A", 10.0),
        record("p1", "B", 20.0), record("p2", "B", 10.0),
    };
    const std::string in = temp_path("spgemm_profile_in.csv");
    const std::string out = temp_path("spgemm_profile_out.csv");
    write_bench_csv(in, rows);
    CHECK(run_cli({"profile", "--in", in, "--out", out, "--points", "5"}) == kExitOk);
    const std::string text = slurp(out);
    CHECK(text.find("x,A,B") == 0);
}

TEST_CASE("SPGEMM_THREADS provides the default worker count")
{
    setenv("SPGEMM_THREADS", "3", 1);
    const std::string mtx = temp_path("spgemm_env_in.mtx");
    REQUIRE(run_cli({"gen", "--kind", "banded", "--rows", "60", "--nnz", "3", "--seed", "4",
                     "--out", mtx})
            == kExitOk);
    const std::string out = temp_path("spgemm_env_out.csv");
    CHECK(run_cli({"bench", "--a", mtx, "--b", mtx, "--reps", "1", "--out", out}) == kExitOk);
    unsetenv("SPGEMM_THREADS");
    const auto rows = read_bench_csv(out);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].threads == 3);
}

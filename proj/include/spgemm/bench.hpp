#ifndef SPGEMM_BENCH_HPP
#define SPGEMM_BENCH_HPP

#include <string>
#include <vector>

#include "spgemm/common.hpp"

namespace spgemm {

// One benchmark row: identity, structural statistics of the problem, timing
// averages and the derived rate. gflops uses the 2*flops/time convention
// (one multiply and one add per flop).
struct BenchRecord {
    std::string problem;
    std::string algorithm;
    std::string scheme;
    index_t m = 0, n = 0, k = 0;
    offset_t nnz_a = 0, nnz_b = 0, nnz_c = 0;
    flops_t flops = 0;
    flops_t max_row_flops = 0;
    flops_t max_row_size = 0;
    double cf = 1.0, cmrf = 1.0;
    int threads = 1;
    int reps = 0;
    bool reuse = false;
    double t_compress_ms = 0.0;
    double t_symbolic_ms = 0.0;
    double t_numeric_ms = 0.0;
    double t_total_ms = 0.0;
    double gflops = 0.0;
};

std::string bench_csv_header();
void write_bench_csv(const std::string& path, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_bench_csv(const std::string& path);

// Performance profile: counts[m][g] is the number of problems for which
// method m is within x[g] of the per-problem best time. Methods missing a
// problem contribute no count for it at any x.
struct PerformanceProfile {
    std::vector<double> x; // log-spaced grid from 1 to the largest ratio
    std::vector<std::string> methods;
    std::vector<std::vector<int>> counts; // methods x grid
};

PerformanceProfile compute_profile(const std::vector<BenchRecord>& records,
                                   int grid_points = 50);
void write_profile_csv(const std::string& path, const PerformanceProfile& profile);

} // namespace spgemm

#endif

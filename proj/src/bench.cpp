#include "spgemm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace spgemm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

} // namespace

std::string bench_csv_header()
{
    return "problem,algorithm,scheme,m,n,k,nnz_a,nnz_b,flops,max_row_flops,nnz_c,"
           "max_row_size,cf,cmrf,threads,reps,reuse,t_compress_ms,t_symbolic_ms,"
           "t_numeric_ms,t_total_ms,gflops";
}

void write_bench_csv(const std::string& path, const std::vector<BenchRecord>& records)
{
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw IoError("cannot open '" + path + "' for writing");
    std::fprintf(f, "%s\n", bench_csv_header().c_str());
    for (const BenchRecord& r : records) {
        std::fprintf(f, "%s,%s,%s,%d,%d,%d,%lld,%lld,%lld,%lld,%lld,%lld,%.6f,%.6f,%d,%d,%d,"
                        "%.6f,%.6f,%.6f,%.6f,%.6f\n",
                     r.problem.c_str(), r.algorithm.c_str(), r.scheme.c_str(), r.m, r.n, r.k,
                     static_cast<long long>(r.nnz_a), static_cast<long long>(r.nnz_b),
                     static_cast<long long>(r.flops), static_cast<long long>(r.max_row_flops),
                     static_cast<long long>(r.nnz_c), static_cast<long long>(r.max_row_size),
                     r.cf, r.cmrf, r.threads, r.reps, r.reuse ? 1 : 0, r.t_compress_ms,
                     r.t_symbolic_ms, r.t_numeric_ms, r.t_total_ms, r.gflops);
    }
    if (std::fclose(f) != 0)
        throw IoError("write to '" + path + "' failed");
}

std::vector<BenchRecord> read_bench_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty results file", 1);
    const auto header = split_csv_line(line);
    const auto expected = split_csv_line(bench_csv_header());
    if (header != expected)
        throw ParseError("unexpected results header", 1);

    std::vector<BenchRecord> out;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != expected.size())
            throw ParseError("wrong field count", lineno);
        try {
            BenchRecord r;
            r.problem = f[0];
            r.algorithm = f[1];
            r.scheme = f[2];
            r.m = std::stoi(f[3]);
            r.n = std::stoi(f[4]);
            r.k = std::stoi(f[5]);
            r.nnz_a = std::stoll(f[6]);
            r.nnz_b = std::stoll(f[7]);
            r.flops = std::stoll(f[8]);
            r.max_row_flops = std::stoll(f[9]);
            r.nnz_c = std::stoll(f[10]);
            r.max_row_size = std::stoll(f[11]);
            r.cf = std::stod(f[12]);
            r.cmrf = std::stod(f[13]);
            r.threads = std::stoi(f[14]);
            r.reps = std::stoi(f[15]);
            r.reuse = std::stoi(f[16]) != 0;
            r.t_compress_ms = std::stod(f[17]);
            r.t_symbolic_ms = std::stod(f[18]);
            r.t_numeric_ms = std::stod(f[19]);
            r.t_total_ms = std::stod(f[20]);
            r.gflops = std::stod(f[21]);
            out.push_back(std::move(r));
        } catch (const std::exception&) {
            throw ParseError("malformed field", lineno);
        }
    }
    return out;
}

PerformanceProfile compute_profile(const std::vector<BenchRecord>& records, int grid_points)
{
    if (grid_points < 1)
        throw ContractError("compute_profile: grid_points must be >= 1");

    // best time per problem over all methods that completed it
    std::map<std::string, double> best;
    std::map<std::string, std::map<std::string, double>> times; // method -> problem -> t
    for (const BenchRecord& r : records) {
        if (r.t_total_ms <= 0.0)
            continue;
        auto& t = times[r.algorithm][r.problem];
        t = t == 0.0 ? r.t_total_ms : std::min(t, r.t_total_ms);
        auto it = best.find(r.problem);
        if (it == best.end() || r.t_total_ms < it->second)
            best[r.problem] = r.t_total_ms;
    }
    if (times.size() < 2)
        throw ContractError("compute_profile: need at least two methods");

    double max_ratio = 1.0;
    for (const auto& [method, per_problem] : times)
        for (const auto& [problem, t] : per_problem)
            max_ratio = std::max(max_ratio, t / best.at(problem));

    PerformanceProfile p;
    if (max_ratio == 1.0 || grid_points == 1)
        p.x.push_back(1.0);
    else
        for (int g = 0; g < grid_points; ++g)
            p.x.push_back(std::pow(max_ratio, static_cast<double>(g) / (grid_points - 1)));

    for (const auto& [method, per_problem] : times) {
        p.methods.push_back(method);
        std::vector<int> row;
        row.reserve(p.x.size());
        for (double x : p.x) {
            int count = 0;
            for (const auto& [problem, t] : per_problem)
                if (t / best.at(problem) <= x)
                    ++count;
            row.push_back(count);
        }
        p.counts.push_back(std::move(row));
    }
    return p;
}

void write_profile_csv(const std::string& path, const PerformanceProfile& profile)
{
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw IoError("cannot open '" + path + "' for writing");
    std::fprintf(f, "x");
    for (const auto& m : profile.methods)
        std::fprintf(f, ",%s", m.c_str());
    std::fprintf(f, "\n");
    for (std::size_t g = 0; g < profile.x.size(); ++g) {
        std::fprintf(f, "%.9g", profile.x[g]);
        for (std::size_t m = 0; m < profile.methods.size(); ++m)
            std::fprintf(f, ",%d", profile.counts[m][g]);
        std::fprintf(f, "\n");
    }
    if (std::fclose(f) != 0)
        throw IoError("write to '" + path + "' failed");
}

} // namespace spgemm

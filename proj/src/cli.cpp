#include "spgemm/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "spgemm/bench.hpp"
#include "spgemm/engine.hpp"
#include "spgemm/matrix_market.hpp"
#include "spgemm/oracle.hpp"
#include "spgemm/synthetic.hpp"

namespace spgemm {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int default_threads()
{
    if (const char* env = std::getenv("SPGEMM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1)
            return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string stem_of(const std::string& path)
{
    return std::filesystem::path(path).stem().string();
}

// Loads a matrix and records the pre-processing applied to it.
CsrMatrix load_matrix(const std::string& path)
{
    MatrixMarketInfo info;
    CsrMatrix m = read_matrix_market(path, &info);
    std::printf("loaded %s: %d x %d, %lld stored nonzeros (%s %s%s%s)\n", path.c_str(),
                m.num_rows, m.num_cols, static_cast<long long>(m.nnz()), info.field.c_str(),
                info.symmetry.c_str(),
                info.expanded_symmetric ? ", expanded to full storage" : "",
                info.coalesced_duplicates ? ", duplicates coalesced" : "");
    return m;
}

struct BenchOptions {
    std::string a_path, b_path, r_path, p_path;
    bool triple = false;
    std::string mode = "auto";
    std::string scheme = "seq";
    int threads = default_threads();
    int reps = 5;
    int reuse = 0;
    bool sort_output = false;
    index_t l1_capacity = 0;
    index_t dense_cutoff = 250'000;
    double avg_flops_cutoff = 256.0;
    std::string out_path;
};

SpgemmConfig make_config(const BenchOptions& opt)
{
    SpgemmConfig cfg;
    if (opt.mode == "mem")
        cfg.accumulator = AccumulatorKind::LL;
    else if (opt.mode == "dense")
        cfg.accumulator = AccumulatorKind::Dense;
    else if (opt.mode == "lp")
        cfg.accumulator = AccumulatorKind::LP;
    else
        cfg.accumulator = AccumulatorKind::Auto;
    cfg.scheme = opt.scheme == "flat" ? Scheme::ThreadFlatParallel : Scheme::ThreadSequential;
    cfg.worker_count = opt.threads;
    cfg.sort_output = opt.sort_output;
    cfg.l1_capacity = opt.l1_capacity;
    cfg.dense_cutoff_k = opt.dense_cutoff;
    cfg.avg_flops_cutoff = opt.avg_flops_cutoff;
    return cfg;
}

std::string method_label(const BenchOptions& opt, bool reuse)
{
    std::string label = opt.mode;
    if (opt.scheme == "flat")
        label += "-flat";
    if (reuse)
        label += "-reuse";
    return label;
}

BenchRecord base_record(const std::string& problem, const BenchOptions& opt,
                        const CsrMatrix& a, const CsrMatrix& b, const SpgemmHandle& h)
{
    BenchRecord r;
    r.problem = problem;
    r.scheme = opt.scheme;
    r.m = a.num_rows;
    r.n = a.num_cols;
    r.k = b.num_cols;
    r.nnz_a = a.nnz();
    r.nnz_b = b.nnz();
    r.nnz_c = h.nnz_c();
    r.flops = h.flops.total_flops;
    r.max_row_flops = h.flops.max_row_flops;
    r.max_row_size = h.max_row_size;
    r.cf = h.compression.cf;
    r.cmrf = h.compression.cmrf;
    r.threads = opt.threads;
    return r;
}

double gflops_rate(flops_t flops, double total_ms)
{
    // 2*flops/time: each multiplication pairs with an addition
    return total_ms > 0.0 ? 2.0 * static_cast<double>(flops) / (total_ms * 1e6) : 0.0;
}

// Warmup plus `reps` timed full pipelines, averaged; optionally a reuse
// record timing numeric-only repetitions against one symbolic result.
void bench_problem(const std::string& problem, const CsrMatrix& a, const CsrMatrix& b,
                   const BenchOptions& opt, std::vector<BenchRecord>& out)
{
    const SpgemmConfig cfg = make_config(opt);

    MultiplyResult warm = multiply(a, b, cfg);

    BenchRecord rec = base_record(problem, opt, a, b, warm.handle);
    rec.algorithm = method_label(opt, false);
    rec.reps = opt.reps;
    for (int rep = 0; rep < opt.reps; ++rep) {
        const auto t0 = Clock::now();
        MultiplyResult res = multiply(a, b, cfg);
        const double total = ms_since(t0);
        rec.t_compress_ms += res.handle.compress_ms;
        rec.t_symbolic_ms += res.handle.symbolic_stats.ms;
        rec.t_numeric_ms += res.numeric_stats.ms;
        rec.t_total_ms += total;
    }
    rec.t_compress_ms /= opt.reps;
    rec.t_symbolic_ms /= opt.reps;
    rec.t_numeric_ms /= opt.reps;
    rec.t_total_ms /= opt.reps;
    rec.gflops = gflops_rate(rec.flops, rec.t_total_ms);
    out.push_back(rec);

    if (opt.reuse > 0) {
        BenchRecord ru = base_record(problem, opt, a, b, warm.handle);
        ru.algorithm = method_label(opt, true);
        ru.reuse = true;
        ru.reps = opt.reuse;
        numeric(a, b, warm.handle); // reuse warmup
        for (int rep = 0; rep < opt.reuse; ++rep) {
            PhaseStats st;
            numeric(a, b, warm.handle, &st);
            ru.t_numeric_ms += st.ms;
        }
        ru.t_numeric_ms /= opt.reuse;
        ru.t_total_ms = ru.t_numeric_ms;
        ru.gflops = gflops_rate(ru.flops, ru.t_total_ms);
        out.push_back(ru);
    }
}

int cmd_bench(const BenchOptions& opt)
{
    std::vector<BenchRecord> records;
    if (opt.triple) {
        const CsrMatrix r = load_matrix(opt.r_path);
        const CsrMatrix a = load_matrix(opt.a_path);
        const CsrMatrix p = load_matrix(opt.p_path);
        const std::string stem = stem_of(opt.a_path);
        bench_problem(stem + "_AxP", a, p, opt, records);
        const CsrMatrix ap = multiply(a, p, make_config(opt)).c;
        bench_problem(stem + "_RxAP", r, ap, opt, records);
    } else {
        const CsrMatrix a = load_matrix(opt.a_path);
        const CsrMatrix b = load_matrix(opt.b_path);
        bench_problem(stem_of(opt.a_path) + "x" + stem_of(opt.b_path), a, b, opt, records);
    }
    write_bench_csv(opt.out_path, records);
    std::printf("wrote %zu record(s) to %s\n", records.size(), opt.out_path.c_str());
    return kExitOk;
}

struct VerifyOptions {
    std::string a_path, b_path;
    int threads = default_threads();
    bool inject_error = false; // negative-control hook
};

int cmd_verify(const VerifyOptions& opt)
{
    const CsrMatrix a = load_matrix(opt.a_path);
    const CsrMatrix b = load_matrix(opt.b_path);
    if (a.num_rows > kDenseOracleDimLimit || a.num_cols > kDenseOracleDimLimit
        || b.num_cols > kDenseOracleDimLimit)
        throw ContractError("verify: inputs exceed the oracle size guard of "
                            + std::to_string(kDenseOracleDimLimit) + " per dimension");

    const GustavsonResult oracle = gustavson_serial(a, b);

    constexpr double kTol = 1e-12;
    bool all_ok = true;
    CompareResult first_failure;
    std::string failed_combo;

    const std::map<std::string, AccumulatorKind> accs = {
        {"ll", AccumulatorKind::LL}, {"lp", AccumulatorKind::LP},
        {"dense", AccumulatorKind::Dense}};
    const std::map<std::string, Scheme> schemes = {
        {"seq", Scheme::ThreadSequential}, {"flat", Scheme::ThreadFlatParallel}};

    for (const auto& [acc_name, acc] : accs) {
        for (const auto& [scheme_name, scheme] : schemes) {
            SpgemmConfig cfg;
            cfg.accumulator = acc;
            cfg.scheme = scheme;
            cfg.worker_count = opt.threads;
            CsrMatrix c = multiply(a, b, cfg).c;
            if (opt.inject_error && !c.values.empty())
                c.values[c.values.size() / 2] += 1.0;
            const CompareResult cmp = compare_canonical(oracle.c, canonicalize(c));
            const bool ok = cmp.structure_equal && cmp.max_rel_error <= kTol;
            std::printf("%-5s x %-4s : max relative error %.3e %s\n", acc_name.c_str(),
                        scheme_name.c_str(), cmp.max_rel_error, ok ? "ok" : "FAILED");
            if (!ok && all_ok) {
                all_ok = false;
                first_failure = cmp;
                failed_combo = acc_name + " x " + scheme_name;
            }
        }
    }

    if (!all_ok) {
        std::fprintf(stderr, "verification failed (%s): first differing entry at row %d col %d\n",
                     failed_combo.c_str(), first_failure.first_bad_row,
                     first_failure.first_bad_col);
        return kExitVerifyFailed;
    }
    std::printf("all combinations verified at %.0e\n", kTol);
    return kExitOk;
}

struct GenOptions {
    std::string kind = "uniform-random";
    index_t rows = 0;
    index_t cols = 0; // 0: same as rows
    index_t nnz_per_row = 8;
    std::uint64_t seed = 0;
    std::string out_path;
};

int cmd_gen(const GenOptions& opt)
{
    SyntheticKind kind;
    if (opt.kind == "uniform-random")
        kind = SyntheticKind::UniformRandom;
    else if (opt.kind == "banded")
        kind = SyntheticKind::Banded;
    else if (opt.kind == "skewed")
        kind = SyntheticKind::Skewed;
    else
        throw ContractError("gen: unknown kind '" + opt.kind + "'");

    const index_t cols = opt.cols > 0 ? opt.cols : opt.rows;
    const CsrMatrix m = generate_synthetic(kind, opt.rows, cols, opt.nnz_per_row, opt.seed);
    write_matrix_market(m, opt.out_path);
    std::printf("wrote %d x %d matrix with %lld nonzeros to %s\n", m.num_rows, m.num_cols,
                static_cast<long long>(m.nnz()), opt.out_path.c_str());
    return kExitOk;
}

struct ProfileOptions {
    std::string in_path;
    std::string out_path;
    int points = 50;
};

int cmd_profile(const ProfileOptions& opt)
{
    const std::vector<BenchRecord> records = read_bench_csv(opt.in_path);
    const PerformanceProfile profile = compute_profile(records, opt.points);
    write_profile_csv(opt.out_path, profile);
    std::printf("wrote profile over %zu method(s) to %s\n", profile.methods.size(),
                opt.out_path.c_str());
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args)
{
    CLI::App app{"sparse matrix-matrix multiplication toolkit"};
    app.require_subcommand(1);

    BenchOptions bench_opt;
    CLI::App* bench = app.add_subcommand("bench", "run timed multiplications, write CSV");
    bench->add_option("--a", bench_opt.a_path, "left operand (MatrixMarket)");
    bench->add_option("--b", bench_opt.b_path, "right operand (MatrixMarket)");
    bench->add_option("--r", bench_opt.r_path, "restriction matrix for --triple");
    bench->add_option("--p", bench_opt.p_path, "prolongation matrix for --triple");
    bench->add_flag("--triple", bench_opt.triple, "time R x (A x P) as two multiplies");
    bench->add_option("--mode", bench_opt.mode, "accumulator selection")
        ->check(CLI::IsMember({"auto", "mem", "dense", "lp"}));
    bench->add_option("--scheme", bench_opt.scheme, "partitioning scheme")
        ->check(CLI::IsMember({"seq", "flat"}));
    bench->add_option("--threads", bench_opt.threads, "worker count");
    bench->add_option("--reps", bench_opt.reps, "timed repetitions")->check(CLI::PositiveNumber);
    bench->add_option("--reuse", bench_opt.reuse, "numeric-only repetitions against one handle");
    bench->add_flag("--sort-output", bench_opt.sort_output, "sort result rows by column");
    bench->add_option("--l1-capacity", bench_opt.l1_capacity,
                      "level-1 accumulator entries (0 = per-row bound)");
    bench->add_option("--dense-cutoff", bench_opt.dense_cutoff, "dense accumulator k cutoff");
    bench->add_option("--avg-flops-cutoff", bench_opt.avg_flops_cutoff,
                      "LL vs LP average row flops cutoff");
    bench->add_option("--out", bench_opt.out_path, "output CSV")->required();

    VerifyOptions verify_opt;
    CLI::App* verify = app.add_subcommand("verify", "check all combinations against the oracle");
    verify->add_option("--a", verify_opt.a_path)->required();
    verify->add_option("--b", verify_opt.b_path)->required();
    verify->add_option("--threads", verify_opt.threads);
    verify->add_flag("--inject-error", verify_opt.inject_error)->group(""); // test hook

    GenOptions gen_opt;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic matrix");
    gen->add_option("--kind", gen_opt.kind)
        ->check(CLI::IsMember({"uniform-random", "banded", "skewed"}));
    gen->add_option("--rows", gen_opt.rows)->required()->check(CLI::PositiveNumber);
    gen->add_option("--cols", gen_opt.cols);
    gen->add_option("--nnz", gen_opt.nnz_per_row, "target nonzeros per row");
    gen->add_option("--seed", gen_opt.seed);
    gen->add_option("--out", gen_opt.out_path)->required();

    ProfileOptions profile_opt;
    CLI::App* profile = app.add_subcommand("profile", "performance profile from a results CSV");
    profile->add_option("--in", profile_opt.in_path)->required();
    profile->add_option("--out", profile_opt.out_path)->required();
    profile->add_option("--points", profile_opt.points)->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (bench->parsed()) {
            if (bench_opt.triple) {
                if (bench_opt.r_path.empty() || bench_opt.a_path.empty()
                    || bench_opt.p_path.empty())
                    throw ContractError("bench --triple needs --r, --a and --p");
            } else if (bench_opt.a_path.empty() || bench_opt.b_path.empty()) {
                throw ContractError("bench needs --a and --b");
            }
            return cmd_bench(bench_opt);
        }
        if (verify->parsed())
            return cmd_verify(verify_opt);
        if (gen->parsed())
            return cmd_gen(gen_opt);
        if (profile->parsed())
            return cmd_profile(profile_opt);
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const SpgemmError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace spgemm

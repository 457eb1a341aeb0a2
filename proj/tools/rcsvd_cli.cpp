// rcsvd: command-line front end for the randomized QR-iteration SVD.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure,
// 3 a verified bound does not hold.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcsvd/rcsvd.hpp"

namespace fs = std::filesystem;
using namespace rcsvd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitBound = 3;

constexpr std::uint64_t kDefaultSeed = 42;
constexpr const char* kSeedEnv = "RCSVD_SEED";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// --seed wins, then RCSVD_SEED, then the built-in default.
std::uint64_t effective_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv(kSeedEnv); env && *env) {
        std::uint64_t v = 0;
        std::istringstream in(env);
        std::string rest;
        if (!(in >> v) || (in >> rest) || std::string(env).find('-') != std::string::npos)
            throw UsageError(std::string(kSeedEnv) + "='" + env + "' is not an unsigned 64-bit integer");
        return v;
    }
    return kDefaultSeed;
}

void announce_seed(std::uint64_t seed) { std::cerr << "seed: " << seed << '\n'; }

void require(bool ok, const std::string& what) {
    if (!ok) throw UsageError(what);
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(10);
    s << x;
    return s.str();
}

void check_finite(const LdrDecomposition& dec) {
    if (!all_finite(dec.l) || !all_finite(dec.d) || !all_finite(dec.r_factor))
        throw ConvergenceError("decomposition produced non-finite entries",
                               std::numeric_limits<double>::quiet_NaN());
}

// ---- gen-matrix --------------------------------------------------------

struct GenArgs {
    std::string kind = "product";
    std::size_t m = 0, n = 0, r1 = 0, k = 0;
    double noise = 0.1;
    std::optional<std::uint64_t> seed;
    fs::path out;
};

int run_gen(const GenArgs& g) {
    const std::uint64_t seed = effective_seed(g.seed);
    announce_seed(seed);
    require(g.n >= 1, "--n is required");
    DenseMatrix a;
    if (g.kind == "product") {
        require(g.r1 >= 1, "--r1 is required for --kind product");
        const SpectrumSpec spec{SpectrumKind::product_rank, g.m ? g.m : g.n, g.n, g.r1, seed};
        for (const auto& note : spec.notes()) std::cerr << "warning: " << note << '\n';
        a = gen_product_matrix(spec);
    } else {
        require(g.m == 0 || g.m == g.n, "--kind " + g.kind + " generates square matrices; drop --m or set it to --n");
        if (g.kind == "noisy") {
            require(g.k >= 1 && g.k < g.n, "--k must be in [1, n) for --kind noisy");
            a = gen_noisy_low_rank(g.n, g.k, seed, g.noise);
        } else {
            a = gen_decaying(g.n, seed);
        }
    }
    io::write_matrix_market(a, g.out);
    std::cout << "wrote " << a.shape() << " " << g.kind << " matrix to " << g.out.string() << '\n';
    return kExitOk;
}

// ---- decompose ---------------------------------------------------------

struct DecomposeArgs {
    fs::path in;
    std::string algo = "rcsvd-qr";
    std::size_t k = 10, p = 5, t = 5;
    std::optional<std::uint64_t> seed;
    std::string prefix;
};

int run_decompose(const DecomposeArgs& d) {
    const std::uint64_t seed = effective_seed(d.seed);
    announce_seed(seed);
    const DenseMatrix a = io::read_matrix_market(d.in);
    SketchConfig cfg{d.k, d.p, d.t, seed};
    const bool randomized = d.algo == "rsvd" || d.algo == "rcsvd-qr";
    if (randomized) {
        cfg.validate(a.rows(), a.cols());
    } else {
        require(d.k >= 1 && d.k <= std::min(a.rows(), a.cols()),
                "--k must be in [1, " + std::to_string(std::min(a.rows(), a.cols())) + "] for " + a.shape());
        require(d.t >= 1, "--t must be >= 1");
    }

    const LdrDecomposition dec = run_algorithm(d.algo, a, cfg);
    check_finite(dec);
    const double residual = residual_error(a, dec);
    const double norm = frobenius_norm(a);

    io::write_matrix_market(dec.l, fs::path(d.prefix + "_L.mtx"));
    io::write_matrix_market(dec.d, fs::path(d.prefix + "_D.mtx"));
    io::write_matrix_market(dec.r_factor, fs::path(d.prefix + "_R.mtx"));

    nlohmann::json summary = {
        {"algorithm", d.algo},
        {"m", a.rows()},
        {"n", a.cols()},
        {"k", d.k},
        {"p", randomized ? d.p : 0},
        {"t", d.t},
        {"seed", seed},
        {"rank", dec.rank()},
        {"diag_d", dec.diag_d},
        {"residual", residual},
        {"residual_rel", norm > 0.0 ? residual / norm : 0.0},
    };
    const fs::path summary_path = d.prefix + "_summary.jsonl";
    io::write_atomically(summary_path, [&](std::ostream& out) { out << summary.dump() << '\n'; });
    std::cout << summary.dump() << '\n';
    return kExitOk;
}

// ---- verify-bounds -----------------------------------------------------

struct VerifyArgs {
    std::string check;
    std::size_t trials = 0;
    std::optional<std::uint64_t> seed;
    std::size_t m = 40, n = 30, k = 5, p = 5, t = 5;
    std::string matrix = "decaying";
    std::vector<double> s_diag{1.0, 1.0};
    std::vector<double> t_diag{1.0, 1.0};
    double rel_tol = 0.10;
};

constexpr const char* kBoundCsvHeader = "check,measured,bound,slack,trials,sample_mean,sample_stddev,holds";

void print_report(const BoundReport& r) {
    std::cout << r.check << ',' << fmt(r.measured) << ',' << fmt(r.bound) << ',' << fmt(r.slack)
              << ',' << r.trials << ',' << (r.sample_mean ? fmt(*r.sample_mean) : "") << ','
              << (r.sample_stddev ? fmt(*r.sample_stddev) : "") << ',' << (r.holds ? 1 : 0) << '\n';
}

int run_verify(const VerifyArgs& v) {
    const std::uint64_t seed = effective_seed(v.seed);
    announce_seed(seed);
    std::vector<BoundReport> reports;

    if (v.check == "thm1") {
        // Residual of the factorization against the residual of projecting
        // onto the sketch basis; they must agree to roundoff.
        const std::size_t trials = v.trials ? v.trials : 1;
        for (std::size_t i = 0; i < trials; ++i) {
            const std::uint64_t s = split_seed(seed, i);
            RngState rng(s);
            const DenseMatrix a = gaussian_matrix(rng, v.m, v.n);
            const SketchedFactorization f = rcsvd_qr_detailed(a, SketchConfig{v.k, v.p, v.t, s});
            BoundReport r;
            r.check = "thm1";
            r.measured = residual_error(a, f.ldr);
            r.bound = projection_residual(a, f.basis);
            r.slack = r.bound - r.measured;
            r.holds = std::abs(r.slack) <= 1e-10 * r.bound;
            reports.push_back(r);
        }
    } else if (v.check == "thm2") {
        const std::size_t trials = v.trials ? v.trials : 1;
        for (std::size_t i = 0; i < trials; ++i) {
            const std::uint64_t s = split_seed(seed, i);
            RngState rng(s);
            const DenseMatrix a = gaussian_matrix(rng, v.m, v.n);
            const DenseMatrix omega = gaussian_matrix(rng, v.n, v.k + v.p);
            reports.push_back(check_deterministic_bound(a, omega, v.k));
        }
    } else if (v.check == "prop1") {
        reports.push_back(mc_check_prop1(diagonal(v.s_diag), diagonal(v.t_diag),
                                         v.trials ? v.trials : 10000, seed));
    } else if (v.check == "prop2") {
        reports.push_back(mc_check_prop2(v.k, v.p, v.trials ? v.trials : 2000, seed, v.rel_tol));
    } else {
        require(v.matrix == "decaying" || v.matrix == "noisy",
                "--matrix must be decaying or noisy for thm3");
        const DenseMatrix a = v.matrix == "decaying" ? gen_decaying(v.n, split_seed(seed, 1u << 20))
                                                     : gen_noisy_low_rank(v.n, v.k, split_seed(seed, 1u << 20));
        reports.push_back(mc_check_theorem3(a, v.k, v.p, v.t, v.trials ? v.trials : 200, seed));
    }

    std::cout << kBoundCsvHeader << '\n';
    bool all_hold = true;
    for (const auto& r : reports) {
        print_report(r);
        all_hold = all_hold && r.holds;
    }
    if (!all_hold) {
        std::cerr << "bound violated\n";
        return kExitBound;
    }
    return kExitOk;
}

// ---- trace-convergence -------------------------------------------------

struct TraceArgs {
    std::size_t m = 300, n = 300, r = 300, r1 = 250, tmax = 10;
    std::optional<std::uint64_t> seed;
    fs::path out;
};

int run_trace(const TraceArgs& a) {
    const std::uint64_t seed = effective_seed(a.seed);
    announce_seed(seed);
    require(a.r >= 4, "--r must be at least 4");
    require(a.r <= std::min(a.m, a.n), "--r must not exceed min(m, n)");
    const SpectrumSpec spec{SpectrumKind::product_rank, a.m, a.n, a.r1, seed};
    for (const auto& note : spec.notes()) std::cerr << "warning: " << note << '\n';
    const DenseMatrix m = gen_product_matrix(spec);
    // Only the sketch width matters here; split it as k = r - 2, p = 2.
    const SketchConfig cfg{a.r - 2, 2, 1, split_seed(seed, 1)};
    const ConvergenceTrace tr = convergence_trace(m, cfg, a.tmax, std::min(a.r1, std::min(a.m, a.n)));

    auto emit = [&](std::ostream& out) {
        out << "iteration,relative_error\n";
        out.precision(12);
        for (std::size_t j = 0; j < tr.errors.size(); ++j) out << j + 1 << ',' << tr.errors[j] << '\n';
    };
    if (a.out.empty()) {
        emit(std::cout);
    } else {
        io::write_atomically(a.out, emit);
        std::cout << "wrote " << tr.errors.size() << " iterations to " << a.out.string() << '\n';
    }
    return kExitOk;
}

// ---- bench -------------------------------------------------------------

struct BenchArgs {
    std::vector<std::size_t> sizes{500, 1000, 1500, 2000};
    std::vector<std::string> algos = algorithm_names();
    std::size_t rank = 1000, k = 100, p = 10, t = 5, repeats = 3;
    std::optional<std::uint64_t> seed;
    fs::path out;
};

int run_bench(const BenchArgs& b) {
    const std::uint64_t seed = effective_seed(b.seed);
    announce_seed(seed);
    for (const auto& name : b.algos) require(is_algorithm(name), "unknown algorithm '" + name + "'");
    for (std::size_t n : b.sizes)
        require(n >= b.k + b.p, "size " + std::to_string(n) + " is smaller than k + p");
    BenchOptions opt;
    opt.sizes = b.sizes;
    opt.algorithms = b.algos;
    opt.rank = b.rank;
    opt.target_rank = b.k;
    opt.oversampling = b.p;
    opt.iterations = b.t;
    opt.repeats = b.repeats;
    opt.seed = seed;
    const auto records = bench_suite(opt, b.out);
    std::cout << kBenchCsvHeader << '\n';
    for (const auto& r : records) write_bench_row(std::cout, r);
    return kExitOk;
}

// ---- compress-image / gen-image ----------------------------------------

struct CompressArgs {
    fs::path in, out;
    std::size_t k = 100, t = 5, p = 10;
    std::string algo = "rcsvd-qr";
    std::optional<std::uint64_t> seed;
};

int run_compress(const CompressArgs& c) {
    const std::uint64_t seed = effective_seed(c.seed);
    announce_seed(seed);
    const GrayImage img = io::read_pgm(c.in);
    const CompressionResult res = compress_image(img, {c.k, c.algo, c.t, c.p, seed});
    io::write_pgm(res.image, c.out);
    const BenchRecord& r = res.record;
    std::cout << kBenchCsvHeader << ",psnr_db\n"
              << r.algorithm << ',' << r.m << ',' << r.n << ',' << r.k << ',' << r.p << ',' << r.t
              << ',' << fmt(r.wall_time_ms) << ',' << fmt(r.residual_rel) << ',' << r.seed << ','
              << fmt(psnr(img, res.image)) << '\n';
    return kExitOk;
}

struct GenImageArgs {
    std::size_t width = 512, height = 512;
    std::optional<std::uint64_t> seed;
    fs::path out;
};

int run_gen_image(const GenImageArgs& g) {
    const std::uint64_t seed = effective_seed(g.seed);
    announce_seed(seed);
    io::write_pgm(generate_test_image(g.width, g.height, seed), g.out);
    std::cout << "wrote " << g.width << "x" << g.height << " image to " << g.out.string() << '\n';
    return kExitOk;
}

template <typename T>
void add_seed(CLI::App* cmd, std::optional<T>& seed) {
    cmd->add_option("--seed", seed, std::string("RNG seed (default: $") + kSeedEnv + " or " +
                                        std::to_string(kDefaultSeed) + ")");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized QR-iteration SVD toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rcsvd 0.1.0");

    GenArgs gen;
    auto* c_gen = app.add_subcommand("gen-matrix", "Generate a synthetic test matrix (Matrix Market)");
    c_gen->add_option("--kind", gen.kind, "product | noisy | decaying")
        ->check(CLI::IsMember({"product", "noisy", "decaying"}));
    c_gen->add_option("--m", gen.m, "Rows (product only; defaults to n)");
    c_gen->add_option("--n", gen.n, "Columns")->required()->check(CLI::PositiveNumber);
    c_gen->add_option("--r1", gen.r1, "Rank of the product matrix");
    c_gen->add_option("--k", gen.k, "Rank of the noisy low-rank matrix");
    c_gen->add_option("--noise", gen.noise, "Noise scale of the noisy kind")->check(CLI::NonNegativeNumber);
    add_seed(c_gen, gen.seed);
    c_gen->add_option("--out", gen.out, "Output .mtx path")->required();

    DecomposeArgs dec;
    auto* c_dec = app.add_subcommand("decompose", "Factorize a matrix as L*D*R");
    c_dec->add_option("--in", dec.in, "Input .mtx path")->required();
    c_dec->add_option("--algo", dec.algo, "svd | rsvd | csvd-qr | rcsvd-qr")
        ->check(CLI::IsMember(algorithm_names()));
    c_dec->add_option("--k", dec.k, "Target rank")->check(CLI::PositiveNumber);
    c_dec->add_option("--p", dec.p, "Oversampling");
    c_dec->add_option("--t", dec.t, "QR-iteration passes");
    add_seed(c_dec, dec.seed);
    c_dec->add_option("--out-prefix", dec.prefix, "Prefix for _L/_D/_R.mtx and _summary.jsonl")->required();

    VerifyArgs ver;
    auto* c_ver = app.add_subcommand("verify-bounds", "Check an error bound, print a CSV report");
    c_ver->add_option("--check", ver.check, "thm1 | thm2 | prop1 | prop2 | thm3")
        ->required()
        ->check(CLI::IsMember({"thm1", "thm2", "prop1", "prop2", "thm3"}));
    c_ver->add_option("--trials", ver.trials, "Instances or Monte Carlo trials");
    add_seed(c_ver, ver.seed);
    c_ver->add_option("--m", ver.m, "Rows of the random matrix (thm1, thm2)")->check(CLI::PositiveNumber);
    c_ver->add_option("--n", ver.n, "Columns (thm1, thm2) or size (thm3)")->check(CLI::PositiveNumber);
    c_ver->add_option("--k", ver.k, "Target rank");
    c_ver->add_option("--p", ver.p, "Oversampling");
    c_ver->add_option("--t", ver.t, "QR-iteration passes");
    c_ver->add_option("--matrix", ver.matrix, "Test matrix for thm3: decaying | noisy");
    c_ver->add_option("--s-diag", ver.s_diag, "Diagonal of S for prop1")->delimiter(',');
    c_ver->add_option("--t-diag", ver.t_diag, "Diagonal of T for prop1")->delimiter(',');
    c_ver->add_option("--rel-tol", ver.rel_tol, "Relative band for prop2")->check(CLI::PositiveNumber);

    TraceArgs tr;
    auto* c_tr = app.add_subcommand("trace-convergence", "Relative singular-value error per pass (CSV)");
    c_tr->add_option("--m", tr.m, "Rows")->check(CLI::PositiveNumber);
    c_tr->add_option("--n", tr.n, "Columns")->check(CLI::PositiveNumber);
    c_tr->add_option("--r", tr.r, "Sketch size");
    c_tr->add_option("--r1", tr.r1, "Rank of the test matrix")->check(CLI::PositiveNumber);
    c_tr->add_option("--tmax", tr.tmax, "Number of passes")->check(CLI::PositiveNumber);
    add_seed(c_tr, tr.seed);
    c_tr->add_option("--out", tr.out, "Output CSV (stdout if omitted)");

    BenchArgs be;
    auto* c_be = app.add_subcommand("bench", "Time all algorithms on product matrices (CSV)");
    c_be->add_option("--sizes", be.sizes, "Comma-separated n values")->delimiter(',');
    c_be->add_option("--algos", be.algos, "Comma-separated algorithms")->delimiter(',');
    c_be->add_option("--rank", be.rank, "Rank r1 of the test matrix (clipped to n)")->check(CLI::PositiveNumber);
    c_be->add_option("--k", be.k, "Target rank")->check(CLI::Range(2, 1 << 20));
    c_be->add_option("--p", be.p, "Oversampling")->check(CLI::Range(2, 1 << 20));
    c_be->add_option("--t", be.t, "QR-iteration passes")->check(CLI::PositiveNumber);
    c_be->add_option("--repeats", be.repeats, "Timed runs per cell (median reported)")->check(CLI::PositiveNumber);
    add_seed(c_be, be.seed);
    c_be->add_option("--out", be.out, "Output CSV");

    CompressArgs cp;
    auto* c_cp = app.add_subcommand("compress-image", "Low-rank approximation of a PGM image");
    c_cp->add_option("--in", cp.in, "Input PGM (P2 or P5)")->required();
    c_cp->add_option("--k", cp.k, "Rank kept")->check(CLI::PositiveNumber);
    c_cp->add_option("--algo", cp.algo, "svd | rsvd | csvd-qr | rcsvd-qr")->check(CLI::IsMember(algorithm_names()));
    c_cp->add_option("--t", cp.t, "QR-iteration passes")->check(CLI::PositiveNumber);
    c_cp->add_option("--p", cp.p, "Oversampling")->check(CLI::Range(2, 1 << 20));
    add_seed(c_cp, cp.seed);
    c_cp->add_option("--out", cp.out, "Output PGM (P5)")->required();

    GenImageArgs gi;
    auto* c_gi = app.add_subcommand("gen-image", "Write a synthetic grayscale test image (PGM)");
    c_gi->add_option("--width", gi.width, "Width")->check(CLI::PositiveNumber);
    c_gi->add_option("--height", gi.height, "Height")->check(CLI::PositiveNumber);
    add_seed(c_gi, gi.seed);
    c_gi->add_option("--out", gi.out, "Output PGM")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        std::cerr << sub->help();
        return kExitValidation;
    }

    try {
        if (c_gen->parsed()) return run_gen(gen);
        if (c_dec->parsed()) return run_decompose(dec);
        if (c_ver->parsed()) return run_verify(ver);
        if (c_tr->parsed()) return run_trace(tr);
        if (c_be->parsed()) return run_bench(be);
        if (c_cp->parsed()) return run_compress(cp);
        if (c_gi->parsed()) return run_gen_image(gi);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}

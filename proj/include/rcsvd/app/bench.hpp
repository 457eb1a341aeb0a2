#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "rcsvd/analysis.hpp"
#include "rcsvd/decomp.hpp"
#include "rcsvd/io/atomic_file.hpp"
#include "rcsvd/svd.hpp"
#include "rcsvd/synth.hpp"

namespace rcsvd {

/// One timed run of one algorithm.
struct BenchRecord {
    std::string algorithm;
    std::size_t m = 0, n = 0, k = 0, p = 0, t = 0;
    double wall_time_ms = 0.0;
    double residual_rel = 0.0;
    std::uint64_t seed = 0;
};

inline const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{"svd", "rsvd", "csvd-qr", "rcsvd-qr"};
    return names;
}

inline bool is_algorithm(const std::string& name) {
    const auto& names = algorithm_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

/**
 * Rank-k factorization of a by the named algorithm:
 *   svd       truncated Jacobi SVD, rank k
 *   csvd-qr   QR iteration on a itself, r = k
 *   rsvd      sketch of size k + p, exact SVD of the reduced matrix
 *   rcsvd-qr  sketch of size k + p, QR iteration on the reduced matrix
 * The randomized results keep all k + p factors; callers truncate if needed.
 */
inline LdrDecomposition run_algorithm(const std::string& name, const DenseMatrix& a,
                                      const SketchConfig& cfg) {
    if (name == "svd") return truncated_svd(a, cfg.target_rank);
    if (name == "csvd-qr") return csvd_qr(a, cfg.target_rank, cfg.iterations);
    if (name == "rsvd") return rsvd_baseline(a, cfg);
    if (name == "rcsvd-qr") return rcsvd_qr(a, cfg);
    throw PreconditionError("unknown algorithm '" + name + "'");
}

template <typename F>
double time_ms(F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

/// One untimed warm-up, then the median of `repeats` timed runs.
template <typename F>
double median_time_ms(F&& fn, std::size_t repeats = 3) {
    fn();
    std::vector<double> samples;
    for (std::size_t i = 0; i < repeats; ++i) samples.push_back(time_ms(fn));
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

inline constexpr const char* kBenchCsvHeader = "algorithm,m,n,k,p,t,wall_time_ms,residual_rel,seed";

inline void write_bench_row(std::ostream& out, const BenchRecord& r) {
    out << r.algorithm << ',' << r.m << ',' << r.n << ',' << r.k << ',' << r.p << ',' << r.t
        << ',' << r.wall_time_ms << ',' << r.residual_rel << ',' << r.seed << '\n';
}

struct BenchOptions {
    std::vector<std::size_t> sizes;
    std::vector<std::string> algorithms = algorithm_names();
    std::size_t rank = 1000; // r1 of the product test matrix, clipped to n
    std::size_t target_rank = 100;
    std::size_t oversampling = 10;
    std::size_t iterations = 5;
    std::size_t repeats = 3;
    std::uint64_t seed = 0;
};

/**
 * Times every algorithm on an n x n product matrix of rank min(r1, n) for
 * each size, sequentially, and writes the records as CSV (one row per size
 * and algorithm, in input order) when out_csv is non-empty.
 */
inline std::vector<BenchRecord> bench_suite(const BenchOptions& opt,
                                            const std::filesystem::path& out_csv = {}) {
    if (opt.sizes.empty()) throw PreconditionError("bench_suite: no sizes given");
    for (const auto& name : opt.algorithms)
        if (!is_algorithm(name)) throw PreconditionError("bench_suite: unknown algorithm '" + name + "'");

    std::vector<BenchRecord> records;
    for (std::size_t n : opt.sizes) {
        const SpectrumSpec spec{SpectrumKind::product_rank, n, n, std::min(opt.rank, n), opt.seed};
        const DenseMatrix a = gen_product_matrix(spec);
        const double norm = frobenius_norm(a);
        const SketchConfig cfg{opt.target_rank, opt.oversampling, opt.iterations,
                               split_seed(opt.seed, n)};
        for (const auto& name : opt.algorithms) {
            LdrDecomposition dec;
            BenchRecord rec{name, n, n, opt.target_rank, opt.oversampling, opt.iterations, 0.0, 0.0,
                            cfg.seed};
            rec.wall_time_ms =
                median_time_ms([&] { dec = run_algorithm(name, a, cfg); }, opt.repeats);
            rec.residual_rel = norm > 0.0 ? residual_error(a, dec) / norm : 0.0;
            records.push_back(rec);
        }
    }
    if (!out_csv.empty()) {
        io::write_atomically(out_csv, [&](std::ostream& out) {
            out << kBenchCsvHeader << '\n';
            out.precision(10);
            for (const auto& r : records) write_bench_row(out, r);
        });
    }
    return records;
}

} // namespace rcsvd

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcsvd/decomp.hpp"
#include "rcsvd/ldr.hpp"
#include "rcsvd/matrix.hpp"
#include "rcsvd/qr.hpp"
#include "rcsvd/random.hpp"
#include "rcsvd/svd.hpp"

namespace rcsvd {

/// Outcome of comparing an observed quantity with its theoretical value.
/// sample_mean / sample_stddev are set only for Monte Carlo checks.
struct BoundReport {
    std::string check;
    double measured = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    std::size_t trials = 1;
    std::optional<double> sample_mean;
    std::optional<double> sample_stddev;
    bool holds = false;
};

/// Relative singular-value error per QR-iteration pass.
struct ConvergenceTrace {
    std::vector<double> errors; // errors[j] belongs to pass j + 1
    std::size_t sketch_size = 0;
    std::size_t rank = 0;
    std::size_t t_max = 0;
};

namespace detail {

// Running mean and variance (Welford) with a Neumaier-compensated sum for
// the mean itself.
class SampleStats {
public:
    void add(double x) {
        ++n_;
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return n_ == 0 ? 0.0 : (sum_ + comp_) / static_cast<double>(n_); }
    double stddev() const noexcept {
        return n_ < 2 ? 0.0 : std::sqrt(m2_ / static_cast<double>(n_ - 1));
    }

private:
    std::size_t n_ = 0;
    double sum_ = 0.0;
    double comp_ = 0.0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

inline void fill_sample_fields(BoundReport& rep, const SampleStats& stats) {
    rep.trials = stats.count();
    rep.sample_mean = stats.mean();
    rep.sample_stddev = stats.stddev();
    rep.measured = stats.mean();
    rep.slack = rep.bound - rep.measured;
}

} // namespace detail

/**
 * Relative error of estimated singular values against true ones over the
 * leading min(r, r1) entries:
 *   sum | |d_i| - sigma_i | / sum sigma_i.
 * Both sequences must already be sorted by descending magnitude.
 */
inline double relative_sv_error(std::span<const double> diag_d, std::span<const double> sigma_true,
                                std::size_t r, std::size_t r1) {
    const std::size_t t = std::min(r, r1);
    if (t == 0) throw PreconditionError("relative_sv_error: min(r, r1) must be positive");
    if (diag_d.size() < t || sigma_true.size() < t) {
        throw ShapeError("relative_sv_error: need " + std::to_string(t) + " values, got " +
                         std::to_string(diag_d.size()) + " estimates and " +
                         std::to_string(sigma_true.size()) + " singular values");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        num += std::abs(std::abs(diag_d[i]) - sigma_true[i]);
        den += sigma_true[i];
    }
    if (den == 0.0) throw PreconditionError("relative_sv_error: all reference singular values are zero");
    return num / den;
}

/// Frobenius norm of a - L*D*R.
inline double residual_error(const DenseMatrix& a, const LdrDecomposition& dec) {
    if (dec.l.rows() != a.rows() || dec.r_factor.cols() != a.cols()) {
        throw ShapeError("residual_error: factors " + dec.l.shape() + " / " +
                         dec.r_factor.shape() + " do not match " + a.shape());
    }
    return frobenius_norm(a - dec.reconstruct());
}

/// Frobenius norm of a - W*Wᵀ*a, the error of projecting onto range(W).
inline double projection_residual(const DenseMatrix& a, const DenseMatrix& w) {
    return frobenius_norm(a - matmul(w, matmul_tn(w, a)));
}

/**
 * Deterministic bound for a given test matrix omega (n x r, r >= k):
 *   |(I - P_Y) a|_F^2 <= |S2|_F^2 + |S2 * O2 * pinv(O1)|_F^2
 * with Y = a*omega, O1 = V1ᵀ*omega, O2 = V2ᵀ*omega and S2 the trailing
 * singular values of a beyond k. P_Y is applied as W*Wᵀ with W from QR(Y).
 * Requires O1 to have full row rank (smallest singular value > 1e-10).
 * Holds when slack >= -1e-8 * bound, less a roundoff floor of
 * (64 eps |a|_F)^2.
 */
inline BoundReport check_deterministic_bound(const DenseMatrix& a, const DenseMatrix& omega,
                                             std::size_t k) {
    if (omega.rows() != a.cols()) {
        throw ShapeError("check_deterministic_bound: omega " + omega.shape() +
                         " does not match " + a.shape());
    }
    if (omega.cols() < k) {
        throw PreconditionError("check_deterministic_bound: need at least k=" +
                                std::to_string(k) + " test vectors, got " +
                                std::to_string(omega.cols()));
    }
    const SvdTriple s = svd_jacobi(a);
    const SpectralSplit split = spectral_split(s, k);
    const DenseMatrix omega1 = matmul_tn(split.v1, omega);
    const DenseMatrix omega2 = matmul_tn(split.v2, omega);

    const double smallest = svd_jacobi(omega1).sigma.back();
    if (!(smallest > 1e-10)) {
        throw PreconditionError(
            "check_deterministic_bound: V1ᵀ*omega is rank deficient (smallest singular value " +
            std::to_string(smallest) + ")");
    }

    const DenseMatrix w = qr_householder(matmul(a, omega)).q;
    const double lhs = std::pow(projection_residual(a, w), 2);
    const double tail = std::pow(frobenius_norm(split.sigma2), 2);
    const double coupling =
        std::pow(frobenius_norm(matmul(matmul(split.sigma2, omega2), pseudo_inverse(omega1))), 2);

    BoundReport rep;
    rep.check = "thm2";
    rep.measured = lhs;
    rep.bound = tail + coupling;
    rep.slack = rep.bound - rep.measured;
    // Both sides are squared norms, so roundoff sits near (eps*|a|_F)^2;
    // without this floor a zero tail spectrum compares noise with noise.
    const double floor = std::pow(64.0 * std::numeric_limits<double>::epsilon() * frobenius_norm(a), 2);
    rep.holds = rep.slack >= -1e-8 * rep.bound - floor;
    return rep;
}

/**
 * Monte Carlo check that E|S*H*T|_F^2 = |S|_F^2 * |T|_F^2 for standard
 * Gaussian H. Passes when the sample mean is within sigma_band standard
 * errors of the expectation.
 */
inline BoundReport mc_check_prop1(const DenseMatrix& s, const DenseMatrix& t_mat,
                                  std::size_t trials, std::uint64_t seed,
                                  double sigma_band = 5.0) {
    if (trials < 100) throw PreconditionError("mc_check_prop1: need at least 100 trials");
    RngState rng(seed);
    detail::SampleStats stats;
    for (std::size_t i = 0; i < trials; ++i) {
        const DenseMatrix h = gaussian_matrix(rng, s.cols(), t_mat.rows());
        stats.add(std::pow(frobenius_norm(matmul(matmul(s, h), t_mat)), 2));
    }
    BoundReport rep;
    rep.check = "prop1";
    rep.bound = std::pow(frobenius_norm(s), 2) * std::pow(frobenius_norm(t_mat), 2);
    detail::fill_sample_fields(rep, stats);
    rep.holds = std::abs(stats.mean() - rep.bound) <=
                sigma_band * stats.stddev() / std::sqrt(static_cast<double>(trials)) + 1e-12;
    return rep;
}

/**
 * Monte Carlo check that E|pinv(H)|_F^2 = k / (p - 1) for a k x (k + p)
 * standard Gaussian H. Passes when the sample mean is within rel_tol of
 * the formula. More than 1% failed pseudo-inverses raises ConvergenceError.
 */
inline BoundReport mc_check_prop2(std::size_t k, std::size_t p, std::size_t trials,
                                  std::uint64_t seed, double rel_tol = 0.10) {
    if (k < 2 || p < 2) throw PreconditionError("mc_check_prop2: need k >= 2 and p >= 2");
    if (trials < 500) throw PreconditionError("mc_check_prop2: need at least 500 trials");
    RngState rng(seed);
    detail::SampleStats stats;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const DenseMatrix h = gaussian_matrix(rng, k, k + p);
        try {
            stats.add(std::pow(frobenius_norm(pseudo_inverse(h)), 2));
        } catch (const ConvergenceError&) {
            ++failures;
        }
    }
    if (failures * 100 > trials) {
        throw ConvergenceError("mc_check_prop2: " + std::to_string(failures) + " of " +
                                   std::to_string(trials) + " pseudo-inverses failed",
                               static_cast<double>(failures));
    }
    BoundReport rep;
    rep.check = "prop2";
    rep.bound = static_cast<double>(k) / static_cast<double>(p - 1);
    detail::fill_sample_fields(rep, stats);
    rep.holds = std::abs(stats.mean() - rep.bound) <= rel_tol * rep.bound;
    return rep;
}

/// sqrt(1 + k/(p-1)) * sqrt(sum_{j>k} sigma_j^2).
inline double expected_error_bound(std::span<const double> sigma, std::size_t k, std::size_t p) {
    double tail = 0.0;
    for (std::size_t j = k; j < sigma.size(); ++j) tail += sigma[j] * sigma[j];
    return std::sqrt(1.0 + static_cast<double>(k) / static_cast<double>(p - 1)) * std::sqrt(tail);
}

/**
 * Monte Carlo check of the expected Frobenius error of rcsvd_qr against
 * sqrt(1 + k/(p-1)) * |Sigma_2|_F. Trial i uses seed split_seed(seed, i).
 * Passes when mean <= bound * (1 + 3*stddev / (mean*sqrt(trials))), or when
 * the mean is below the roundoff floor 1e-8 * |a|_F (zero tail spectrum).
 */
inline BoundReport mc_check_theorem3(const DenseMatrix& a, std::size_t k, std::size_t p,
                                     std::size_t t, std::size_t trials, std::uint64_t seed) {
    if (trials < 100) throw PreconditionError("mc_check_theorem3: need at least 100 trials");
    SketchConfig cfg{k, p, t, seed};
    cfg.validate(a.rows(), a.cols());

    detail::SampleStats stats;
    for (std::size_t i = 0; i < trials; ++i) {
        cfg.seed = split_seed(seed, i);
        stats.add(residual_error(a, rcsvd_qr(a, cfg)));
    }
    BoundReport rep;
    rep.check = "thm3";
    rep.bound = expected_error_bound(svd_jacobi(a).sigma, k, p);
    detail::fill_sample_fields(rep, stats);
    const double mean = stats.mean();
    const double clt = mean > 0.0 ? 3.0 * stats.stddev() / (mean * std::sqrt(static_cast<double>(trials)))
                                  : 0.0;
    rep.holds = mean <= rep.bound * (1.0 + clt) || mean <= 1e-8 * frobenius_norm(a);
    return rep;
}

/// Number of singular values above 1e-10 * sigma_1.
inline std::size_t numerical_rank(std::span<const double> sigma) {
    if (sigma.empty() || sigma.front() == 0.0) return 0;
    std::size_t r = 0;
    while (r < sigma.size() && sigma[r] > 1e-10 * sigma.front()) ++r;
    return r;
}

/**
 * Relative singular-value error after each of t_max QR-iteration passes of
 * rcsvd_qr, all on one sketch. rank defaults to the numerical rank of a.
 */
inline ConvergenceTrace convergence_trace(const DenseMatrix& a, SketchConfig cfg,
                                          std::size_t t_max,
                                          std::optional<std::size_t> rank = std::nullopt) {
    if (t_max < 1) throw PreconditionError("convergence_trace: t_max must be >= 1");
    const std::vector<double> sigma = svd_jacobi(a).sigma;
    ConvergenceTrace trace;
    trace.sketch_size = cfg.sketch_size();
    trace.rank = rank.value_or(numerical_rank(sigma));
    trace.t_max = t_max;
    cfg.iterations = t_max;
    rcsvd_qr_detailed(a, cfg, [&](const CsvdIterate& it) {
        std::vector<double> d = diagonal_of(it.d);
        std::sort(d.begin(), d.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
        trace.errors.push_back(relative_sv_error(d, sigma, trace.sketch_size, trace.rank));
    });
    return trace;
}

} // namespace rcsvd

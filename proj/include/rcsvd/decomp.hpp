#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "rcsvd/ldr.hpp"
#include "rcsvd/matrix.hpp"
#include "rcsvd/qr.hpp"
#include "rcsvd/random.hpp"
#include "rcsvd/svd.hpp"

namespace rcsvd {

/// Parameters of the randomized algorithms. The sketch has
/// target_rank + oversampling columns.
struct SketchConfig {
    std::size_t target_rank = 10;
    std::size_t oversampling = 5;
    std::size_t iterations = 5;
    std::uint64_t seed = 0;

    std::size_t sketch_size() const noexcept { return target_rank + oversampling; }

    /// Throws unless k >= 2, p >= 2, t >= 1 and k + p <= min(rows, cols).
    void validate(std::size_t rows, std::size_t cols) const {
        if (target_rank < 2)
            throw PreconditionError("SketchConfig: target rank must be >= 2, got " +
                                    std::to_string(target_rank));
        if (oversampling < 2)
            throw PreconditionError("SketchConfig: oversampling must be >= 2, got " +
                                    std::to_string(oversampling));
        if (iterations < 1) throw PreconditionError("SketchConfig: iterations must be >= 1");
        if (sketch_size() > std::min(rows, cols))
            throw ShapeError("SketchConfig: sketch size " + std::to_string(sketch_size()) +
                             " exceeds min dimension of " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
};

/// State after one pass of the QR iteration; l * d * r reconstructs the
/// iterated matrix (d is stored lower triangular, like the final output).
struct CsvdIterate {
    std::size_t iteration;
    const DenseMatrix& l;
    const DenseMatrix& d;
    const DenseMatrix& r;
};

using IterationObserver = std::function<void(const CsvdIterate&)>;

/**
 * QR-iteration approximate SVD of b with r factors and t passes.
 *
 * Starting from R = eye(r, n), each pass QR-factorizes b*Rᵀ = L*T, then
 * bᵀ*L = Rc*Dc; the new R is Rcᵀ and the returned D is Dcᵀ. Every pass
 * satisfies L*D*R = L*Lᵀ*b exactly, so once r reaches rank(b) the product
 * reproduces b from the first pass on; further passes only drive D towards
 * a diagonal matrix.
 */
inline LdrDecomposition csvd_qr(const DenseMatrix& b, std::size_t r, std::size_t t,
                                const IterationObserver& observer = {}) {
    if (r == 0 || r > std::min(b.rows(), b.cols())) {
        throw ShapeError("csvd_qr: r=" + std::to_string(r) + " outside [1, min dim] for " +
                         b.shape());
    }
    if (t < 1) throw PreconditionError("csvd_qr: need at least one iteration");

    LdrDecomposition out;
    out.r_factor = eye(r, b.cols());
    for (std::size_t j = 1; j <= t; ++j) {
        out.l = qr_householder(matmul_nt(b, out.r_factor)).q;
        QrFactors right = qr_householder(matmul_tn(b, out.l));
        out.r_factor = transpose(right.q);
        out.d = transpose(right.t);
        if (observer) observer(CsvdIterate{j, out.l, out.d, out.r_factor});
    }
    out.diag_d = diagonal_of(out.d);
    out.iterations_run = t;
    return out;
}

/// Gaussian test matrix of the sketch: cols(a) x sketch_size, drawn from cfg.seed.
inline DenseMatrix sketch_test_matrix(const SketchConfig& cfg, std::size_t cols) {
    RngState rng(cfg.seed);
    return gaussian_matrix(rng, cols, cfg.sketch_size());
}

/// Orthonormal basis W of range(a * Omega).
inline DenseMatrix range_basis(const DenseMatrix& a, const SketchConfig& cfg) {
    cfg.validate(a.rows(), a.cols());
    return qr_householder(matmul(a, sketch_test_matrix(cfg, a.cols()))).q;
}

/// Randomized result together with the sketch basis it was built on.
struct SketchedFactorization {
    LdrDecomposition ldr;
    DenseMatrix basis;
};

/**
 * Randomized QR-iteration SVD: sketch Y = a*Omega, orthonormalize Y = W*C,
 * reduce B = Wᵀ*a, run csvd_qr on B and lift the left factor back by W.
 * The observer, if set, sees the iterates of the reduced problem.
 */
inline SketchedFactorization rcsvd_qr_detailed(const DenseMatrix& a, const SketchConfig& cfg,
                                               const IterationObserver& observer = {}) {
    DenseMatrix w = range_basis(a, cfg);
    LdrDecomposition inner = csvd_qr(matmul_tn(w, a), cfg.sketch_size(), cfg.iterations,
                                     observer);
    inner.l = matmul(w, inner.l);
    return SketchedFactorization{std::move(inner), std::move(w)};
}

inline LdrDecomposition rcsvd_qr(const DenseMatrix& a, const SketchConfig& cfg) {
    return rcsvd_qr_detailed(a, cfg).ldr;
}

/// Classical randomized SVD on the same sketch: exact SVD of B = Wᵀ*a.
inline LdrDecomposition rsvd_baseline(const DenseMatrix& a, const SketchConfig& cfg) {
    const DenseMatrix w = range_basis(a, cfg);
    const SvdTriple small = svd_jacobi(matmul_tn(w, a));
    LdrDecomposition out;
    out.l = matmul(w, small.u);
    out.d = diagonal(small.sigma);
    out.r_factor = transpose(small.v);
    out.diag_d = small.sigma;
    return out;
}

} // namespace rcsvd

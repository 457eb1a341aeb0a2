#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "rcsvd/matrix.hpp"

namespace rcsvd {

/// Thin QR factors: q is m x n with orthonormal columns, t is n x n upper
/// triangular with a non-negative diagonal.
struct QrFactors {
    DenseMatrix q;
    DenseMatrix t;
};

/// QR with column pivoting: a(:, perm) = q * t.
struct PivotedQrFactors {
    DenseMatrix q;
    DenseMatrix t;
    std::vector<std::size_t> perm;
};

namespace detail {

// Columns whose remaining norm falls below this fraction of their original
// norm are treated as linearly dependent on the preceding ones.
inline constexpr double kQrDependenceTol = 1e-14;

inline double norm2(const double* x, std::size_t n) {
    double scale = 0.0;
    double ssq = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == 0.0) continue;
        const double ax = std::abs(x[i]);
        if (scale < ax) {
            ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
            scale = ax;
        } else {
            ssq += (ax / scale) * (ax / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

inline double dot(const double* __restrict x, const double* __restrict y, std::size_t n) {
    double s[4] = {0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (std::size_t l = 0; l < 4; ++l) s[l] += x[i + l] * y[i + l];
    for (; i < n; ++i) s[0] += x[i] * y[i];
    return (s[0] + s[1]) + (s[2] + s[3]);
}

// Applies I - tau*v*vᵀ to x, with v and x of length n.
inline void apply_reflector(const double* __restrict v, double tau, double* __restrict x,
                            std::size_t n) {
    const double s = tau * dot(v, x, n);
    for (std::size_t i = 0; i < n; ++i) x[i] -= s * v[i];
}

struct HouseholderWork {
    DenseMatrix cols; // row j: column j, overwritten by R above and v below the diagonal
    std::vector<double> tau;
    std::vector<double> diag;
    std::vector<std::size_t> perm;
};

// Householder reduction of the columns stored as rows of `work.cols`. With
// `pivot`, the remaining column of largest norm is moved to position j at
// every step.
inline void householder_reduce(HouseholderWork& work, bool pivot) {
    DenseMatrix& cols = work.cols;
    const std::size_t n = cols.rows();
    const std::size_t m = cols.cols();
    work.tau.assign(n, 0.0);
    work.diag.assign(n, 0.0);
    work.perm.resize(n);
    std::iota(work.perm.begin(), work.perm.end(), std::size_t{0});

    std::vector<double> original(n);
    for (std::size_t j = 0; j < n; ++j) original[j] = norm2(cols.row(j).data(), m);

    for (std::size_t j = 0; j < n; ++j) {
        if (pivot) {
            std::size_t best = j;
            double best_norm = -1.0;
            for (std::size_t c = j; c < n; ++c) {
                const double* x = cols.row(c).data() + j;
                const double nrm = std::sqrt(dot(x, x, m - j));
                if (nrm > best_norm) {
                    best_norm = nrm;
                    best = c;
                }
            }
            if (best != j) {
                std::swap_ranges(cols.row(j).begin(), cols.row(j).end(), cols.row(best).begin());
                std::swap(work.perm[j], work.perm[best]);
                std::swap(original[j], original[best]);
            }
        }

        double* x = cols.row(j).data() + j;
        const std::size_t len = m - j;
        const double alpha = norm2(x, len);

        if (alpha == 0.0 || alpha <= kQrDependenceTol * original[j]) {
            // Dependent column: identity in place of a reflector. Its
            // column of Q comes from the accumulated product of the others.
            std::fill(x, x + len, 0.0);
            continue;
        }

        const double beta = x[0] >= 0.0 ? -alpha : alpha;
        x[0] -= beta;
        // Scale v so that v[0] = 1.
        const double v0 = x[0];
        for (std::size_t i = 1; i < len; ++i) x[i] /= v0;
        x[0] = 1.0;
        const double vtv = 1.0 + dot(x + 1, x + 1, len - 1);
        work.tau[j] = 2.0 / vtv;
        work.diag[j] = beta;

        for (std::size_t c = j + 1; c < n; ++c)
            apply_reflector(x, work.tau[j], cols.row(c).data() + j, len);
    }
}

// Builds (q, t) from a finished reduction, flipping signs so diag(t) >= 0.
inline std::pair<DenseMatrix, DenseMatrix> assemble_qt(const HouseholderWork& work) {
    const DenseMatrix& cols = work.cols;
    const std::size_t n = cols.rows();
    const std::size_t m = cols.cols();

    DenseMatrix t(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        t(j, j) = work.diag[j];
        for (std::size_t i = 0; i < j; ++i) t(i, j) = cols(j, i);
    }

    // Q = H_0 ... H_{n-1} [I; 0], one column (a row of qt) at a time.
    DenseMatrix qt(n, m);
    for (std::size_t c = 0; c < n; ++c) qt(c, c) = 1.0;
    for (std::size_t jj = n; jj-- > 0;) {
        if (work.tau[jj] == 0.0) continue;
        const double* v = cols.row(jj).data() + jj;
        for (std::size_t c = jj; c < n; ++c)
            apply_reflector(v, work.tau[jj], qt.row(c).data() + jj, m - jj);
    }

    for (std::size_t j = 0; j < n; ++j) {
        if (t(j, j) < 0.0) {
            for (std::size_t c = j; c < n; ++c) t(j, c) = -t(j, c);
            for (double& x : qt.row(j)) x = -x;
        }
    }
    return {transpose(qt), std::move(t)};
}

} // namespace detail

/**
 * Householder thin QR of a tall-or-square matrix.
 *
 * The factor q is always orthonormal, including for rank-deficient input:
 * a column that is dependent on its predecessors gets no reflector, its
 * diagonal entry in t is set to 0, and the matching column of q is the
 * corresponding column of the accumulated reflector product, which is
 * orthogonal to the others. Each column of q is sign-flipped so that the
 * diagonal of t is non-negative, which makes the factorization unique for
 * full-rank input.
 */
inline QrFactors qr_householder(const DenseMatrix& a) {
    if (a.rows() < a.cols()) {
        throw ShapeError("qr_householder: need rows >= cols, got " + a.shape());
    }
    detail::HouseholderWork work{transpose(a), {}, {}, {}};
    detail::householder_reduce(work, false);
    auto [q, t] = detail::assemble_qt(work);
    return QrFactors{std::move(q), std::move(t)};
}

/// Householder QR with greedy column pivoting; t has non-increasing diagonal.
inline PivotedQrFactors qr_householder_pivoted(const DenseMatrix& a) {
    if (a.rows() < a.cols()) {
        throw ShapeError("qr_householder_pivoted: need rows >= cols, got " + a.shape());
    }
    detail::HouseholderWork work{transpose(a), {}, {}, {}};
    detail::householder_reduce(work, true);
    auto [q, t] = detail::assemble_qt(work);
    return PivotedQrFactors{std::move(q), std::move(t), std::move(work.perm)};
}

} // namespace rcsvd

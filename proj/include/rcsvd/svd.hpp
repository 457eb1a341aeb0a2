#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "rcsvd/ldr.hpp"
#include "rcsvd/matrix.hpp"
#include "rcsvd/qr.hpp"

namespace rcsvd {

/// Thin SVD: a = u * diag(sigma) * vᵀ with q = min(m, n) singular triplets.
struct SvdTriple {
    DenseMatrix u;
    std::vector<double> sigma;
    DenseMatrix v;
};

struct JacobiOptions {
    std::size_t max_sweeps = 60;
    /// Rotation threshold on |<a_i, a_j>| / (|a_i| |a_j|).
    double tolerance = 1e-14;
};

namespace detail {

// Completes the columns of u flagged in `missing` to an orthonormal set,
// using the reflector product of a QR factorization of the known columns.
inline void complete_orthonormal(DenseMatrix& u, const std::vector<bool>& missing) {
    DenseMatrix padded = u;
    for (std::size_t i = 0; i < u.rows(); ++i)
        for (std::size_t j = 0; j < u.cols(); ++j)
            if (missing[j]) padded(i, j) = 0.0;
    // Known columns first so that every filled column is orthogonal to all of them.
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < u.cols(); ++j)
        if (!missing[j]) order.push_back(j);
    for (std::size_t j = 0; j < u.cols(); ++j)
        if (missing[j]) order.push_back(j);
    const QrFactors f = qr_householder(select_columns(padded, order));
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
        const std::size_t j = order[slot];
        if (!missing[j]) continue;
        for (std::size_t i = 0; i < u.rows(); ++i) u(i, j) = f.q(i, slot);
    }
}

// Entries of the 2x2 Gram matrix of x and y. Four interleaved partial sums
// keep the loop pipelined; the summation order is fixed, so results are
// reproducible.
inline void gram2(const double* __restrict x, const double* __restrict y, std::size_t n,
                  double& xx, double& yy, double& xy) {
    double a[4] = {0, 0, 0, 0}, b[4] = {0, 0, 0, 0}, c[4] = {0, 0, 0, 0};
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        for (std::size_t l = 0; l < 4; ++l) {
            a[l] += x[k + l] * x[k + l];
            b[l] += y[k + l] * y[k + l];
            c[l] += x[k + l] * y[k + l];
        }
    }
    for (; k < n; ++k) {
        a[0] += x[k] * x[k];
        b[0] += y[k] * y[k];
        c[0] += x[k] * y[k];
    }
    xx = (a[0] + a[1]) + (a[2] + a[3]);
    yy = (b[0] + b[1]) + (b[2] + b[3]);
    xy = (c[0] + c[1]) + (c[2] + c[3]);
}

// Rotates the rows of g (the columns of the matrix being diagonalized)
// until they are mutually orthogonal, accumulating the rotations in the rows
// of vt. Returns the roundoff floor below which a column counts as zero.
inline double jacobi_rotate(DenseMatrix& g, DenseMatrix& vt, const JacobiOptions& opt) {
    const std::size_t n = g.rows();
    const std::size_t m = g.cols();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    const double tol = std::max(opt.tolerance, std::sqrt(static_cast<double>(m)) * eps);
    const double fro = frobenius_norm(g);
    // Columns below this norm are at roundoff level; rotating them against
    // each other only chases noise injected by rotations with large columns.
    const double negligible = static_cast<double>(m) * eps * fro;
    const double negligible2 = negligible * negligible;

    // Pairs with a negligible member are skipped outright.
    std::vector<bool> active(n);
    bool converged = n == 1 || fro == 0.0;
    double worst = 0.0;
    for (std::size_t sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
        worst = 0.0;
        std::size_t rotations = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double* x = g.row(j).data();
            active[j] = dot(x, x, m) > negligible2;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                double* __restrict x = g.row(i).data();
                double* __restrict y = g.row(j).data();
                double alpha, beta, gamma;
                gram2(x, y, m, alpha, beta, gamma);
                if (alpha <= negligible2 || beta <= negligible2) continue;
                const double offdiag = std::abs(gamma) / std::sqrt(alpha * beta);
                worst = std::max(worst, offdiag);
                if (offdiag <= tol) continue;
                ++rotations;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < m; ++k) {
                    const double xk = x[k];
                    const double yk = y[k];
                    x[k] = c * xk - s * yk;
                    y[k] = s * xk + c * yk;
                }
                double* __restrict p = vt.row(i).data();
                double* __restrict q = vt.row(j).data();
                for (std::size_t k = 0; k < vt.cols(); ++k) {
                    const double pk = p[k];
                    const double qk = q[k];
                    p[k] = c * pk - s * qk;
                    q[k] = s * pk + c * qk;
                }
            }
        }
        converged = rotations == 0;
    }
    if (!converged) {
        throw ConvergenceError("svd_jacobi: no convergence after " +
                                   std::to_string(opt.max_sweeps) +
                                   " sweeps, largest relative off-diagonal " +
                                   std::to_string(worst),
                               worst);
    }
    return negligible;
}

// SVD of a tall (m >= n) matrix. The matrix is first reduced by pivoted QR,
// a(:, perm) = Q * T, and the Jacobi sweeps run on X = Tᵀ, which is much
// closer to having orthogonal columns. With X * Vx = Ux * S:
//   a = (Q * Vx) * S * (P * Ux)ᵀ.
inline SvdTriple jacobi_tall(const DenseMatrix& a, const JacobiOptions& opt) {
    const std::size_t n = a.cols();

    const PivotedQrFactors f = qr_householder_pivoted(a);
    DenseMatrix g = f.t;          // rows of T = columns of X
    DenseMatrix vt = eye(n, n);   // row j = column j of Vx
    const double negligible = jacobi_rotate(g, vt, opt);

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = detail::norm2(g.row(j).data(), n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    std::vector<double> sigma(n);
    DenseMatrix ux(n, n);
    DenseMatrix vx(n, n);
    std::vector<bool> missing(n, false);
    bool any_missing = false;
    for (std::size_t slot = 0; slot < n; ++slot) {
        const std::size_t j = order[slot];
        sigma[slot] = norms[j];
        for (std::size_t k = 0; k < n; ++k) vx(k, slot) = vt(j, k);
        if (norms[j] <= negligible || norms[j] == 0.0) {
            missing[slot] = true;
            any_missing = true;
            continue;
        }
        for (std::size_t k = 0; k < n; ++k) ux(k, slot) = g(j, k) / norms[j];
    }
    if (any_missing) complete_orthonormal(ux, missing);

    SvdTriple out{matmul(f.q, vx), std::move(sigma), DenseMatrix(n, n)};
    for (std::size_t i = 0; i < n; ++i)
        std::copy(ux.row(i).begin(), ux.row(i).end(), out.v.row(f.perm[i]).begin());
    return out;
}

} // namespace detail

/**
 * Full thin SVD by one-sided (Hestenes) Jacobi rotations.
 *
 * Wide inputs are handled through their transpose. Sweeps stop once no
 * column pair has relative inner product above the tolerance. Singular
 * values come out sorted non-increasing; each right singular vector is
 * signed so that its largest-magnitude entry is positive.
 */
inline SvdTriple svd_jacobi(const DenseMatrix& a, const JacobiOptions& opt = {}) {
    SvdTriple out;
    if (a.rows() >= a.cols()) {
        out = detail::jacobi_tall(a, opt);
    } else {
        SvdTriple t = detail::jacobi_tall(transpose(a), opt);
        out = SvdTriple{std::move(t.v), std::move(t.sigma), std::move(t.u)};
    }
    for (std::size_t j = 0; j < out.sigma.size(); ++j) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < out.v.rows(); ++i)
            if (std::abs(out.v(i, j)) > std::abs(out.v(arg, j))) arg = i;
        if (out.v(arg, j) < 0.0) {
            for (std::size_t i = 0; i < out.v.rows(); ++i) out.v(i, j) = -out.v(i, j);
            for (std::size_t i = 0; i < out.u.rows(); ++i) out.u(i, j) = -out.u(i, j);
        }
    }
    return out;
}

/// Blocks of the SVD split at index k: leading k singular values and right
/// vectors versus the rest.
struct SpectralSplit {
    DenseMatrix sigma1;
    DenseMatrix sigma2;
    DenseMatrix v1;
    DenseMatrix v2;
};

inline SpectralSplit spectral_split(const SvdTriple& s, std::size_t k) {
    const std::size_t q = s.sigma.size();
    if (k < 1 || k >= q) {
        throw ShapeError("spectral_split: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(q - 1) + "]");
    }
    const std::span<const double> sig(s.sigma);
    return SpectralSplit{diagonal(sig.first(k)), diagonal(sig.subspan(k)),
                         block(s.v, 0, 0, s.v.rows(), k), block(s.v, 0, k, s.v.rows(), q - k)};
}

/// Moore-Penrose pseudo-inverse; singular values at or below 1e-12 * sigma_1
/// are treated as zero.
inline DenseMatrix pseudo_inverse(const DenseMatrix& a) {
    const SvdTriple s = svd_jacobi(a);
    const double cutoff = s.sigma.empty() ? 0.0 : 1e-12 * s.sigma.front();
    DenseMatrix scaled_v = s.v;
    for (std::size_t j = 0; j < s.sigma.size(); ++j) {
        const double inv = s.sigma[j] > cutoff ? 1.0 / s.sigma[j] : 0.0;
        for (std::size_t i = 0; i < scaled_v.rows(); ++i) scaled_v(i, j) *= inv;
    }
    return matmul_nt(scaled_v, s.u);
}

/// Optimal rank-k approximation packaged as L = U_k, D = Sigma_k, R = V_kᵀ.
inline LdrDecomposition truncated_svd(const DenseMatrix& a, std::size_t k) {
    const std::size_t q = std::min(a.rows(), a.cols());
    if (k < 1 || k > q) {
        throw ShapeError("truncated_svd: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(q) + "] for " + a.shape());
    }
    const SvdTriple s = svd_jacobi(a);
    LdrDecomposition out;
    out.l = block(s.u, 0, 0, s.u.rows(), k);
    out.diag_d.assign(s.sigma.begin(), s.sigma.begin() + static_cast<std::ptrdiff_t>(k));
    out.d = diagonal(out.diag_d);
    out.r_factor = transpose(block(s.v, 0, 0, s.v.rows(), k));
    return out;
}

} // namespace rcsvd

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rcsvd/svd.hpp"
#include "test_helpers.hpp"

using namespace rcsvd;
using rcsvd::testing::max_abs_diff;
using rcsvd::testing::naive_matmul;
using rcsvd::testing::naive_transpose;
using rcsvd::testing::orthonormality_defect;
using rcsvd::testing::random_matrix;

namespace {

DenseMatrix reassemble(const SvdTriple& s) {
    DenseMatrix us = s.u;
    for (std::size_t i = 0; i < us.rows(); ++i)
        for (std::size_t j = 0; j < s.sigma.size(); ++j) us(i, j) *= s.sigma[j];
    return naive_matmul(us, naive_transpose(s.v));
}

void expect_svd_invariants(const DenseMatrix& a, const SvdTriple& s) {
    const std::size_t q = std::min(a.rows(), a.cols());
    ASSERT_EQ(s.sigma.size(), q);
    for (std::size_t i = 0; i < q; ++i) {
        EXPECT_GE(s.sigma[i], 0.0);
        if (i > 0) {
            EXPECT_LE(s.sigma[i], s.sigma[i - 1]);
        }
    }
    EXPECT_LE(frobenius_norm(reassemble(s) - a), 1e-10 * std::max(1.0, frobenius_norm(a)));
    EXPECT_LE(orthonormality_defect(s.u), 1e-10);
    EXPECT_LE(orthonormality_defect(s.v), 1e-10);
}

} // namespace

TEST(SvdJacobi, DiagonalInput) {
    const DenseMatrix a{{3, 0, 0}, {0, 2, 0}, {0, 0, 1}};
    const SvdTriple s = svd_jacobi(a);
    EXPECT_NEAR(s.sigma[0], 3.0, 1e-14);
    EXPECT_NEAR(s.sigma[1], 2.0, 1e-14);
    EXPECT_NEAR(s.sigma[2], 1.0, 1e-14);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(std::abs(s.u(i, i)), 1.0, 1e-14);
        EXPECT_NEAR(std::abs(s.v(i, i)), 1.0, 1e-14);
    }
}

TEST(SvdJacobi, PermutationMatrix) {
    const SvdTriple s = svd_jacobi(DenseMatrix{{0, 1}, {1, 0}});
    EXPECT_NEAR(s.sigma[0], 1.0, 1e-14);
    EXPECT_NEAR(s.sigma[1], 1.0, 1e-14);
}

TEST(SvdJacobi, SquaredSigmaMatchesPowerIterationEigenvalues) {
    const DenseMatrix a = random_matrix(6, 4, 64);
    const SvdTriple s = svd_jacobi(a);
    const std::vector<double> eig =
        rcsvd::testing::power_iteration_eigenvalues(naive_matmul(naive_transpose(a), a), 5000);
    ASSERT_EQ(eig.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_NEAR(s.sigma[i] * s.sigma[i], eig[i], 1e-8 * eig[i]) << "index " << i;
}

TEST(SvdJacobi, WideInputGoesThroughTranspose) {
    const DenseMatrix a = random_matrix(4, 9, 2);
    const SvdTriple s = svd_jacobi(a);
    EXPECT_EQ(s.u.rows(), 4u);
    EXPECT_EQ(s.v.rows(), 9u);
    expect_svd_invariants(a, s);
}

TEST(SvdJacobi, SignConventionLargestEntryOfVPositive) {
    const SvdTriple s = svd_jacobi(random_matrix(10, 7, 8));
    for (std::size_t j = 0; j < s.v.cols(); ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < s.v.rows(); ++i)
            if (std::abs(s.v(i, j)) > std::abs(best)) best = s.v(i, j);
        EXPECT_GT(best, 0.0);
    }
}

TEST(SvdJacobi, RankDeficientAndZeroInputs) {
    const DenseMatrix low = rcsvd::testing::random_low_rank(15, 10, 3, 4);
    const SvdTriple s = svd_jacobi(low);
    expect_svd_invariants(low, s);
    EXPECT_LT(s.sigma[3], 1e-12 * s.sigma[0]);

    const SvdTriple z = svd_jacobi(DenseMatrix(5, 3));
    for (double x : z.sigma) EXPECT_EQ(x, 0.0);
    EXPECT_LE(orthonormality_defect(z.u), 1e-12);
}

TEST(SvdJacobi, InvariantsOnHundredRandomShapes) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t m = 1 + (seed * 37) % 60;
        const std::size_t n = 1 + (seed * 53) % 60;
        SCOPED_TRACE(std::to_string(m) + "x" + std::to_string(n));
        const DenseMatrix a = random_matrix(m, n, 5000 + seed);
        expect_svd_invariants(a, svd_jacobi(a));
    }
}

TEST(SvdJacobi, ResolvesTinySingularValues) {
    // Graded spectrum down to 1e-9: relative accuracy of each value matters.
    RngState rng(3);
    const std::size_t n = 20;
    DenseMatrix u = qr_householder(gaussian_matrix(rng, n, n)).q;
    const DenseMatrix v = qr_householder(gaussian_matrix(rng, n, n)).q;
    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::pow(10.0, -9.0 * j / (n - 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) u(i, j) *= sigma[j];
    const SvdTriple s = svd_jacobi(matmul_nt(u, v));
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(s.sigma[j], sigma[j], 1e-15 + 1e-6 * sigma[j]);
}

TEST(SpectralSplit, Blocks) {
    SvdTriple s{eye(3, 3), {3, 2, 1}, eye(3, 3)};
    const SpectralSplit a = spectral_split(s, 1);
    EXPECT_EQ(a.sigma1, (DenseMatrix{{3}}));
    EXPECT_EQ(a.sigma2, (DenseMatrix{{2, 0}, {0, 1}}));
    EXPECT_EQ(a.v1.cols(), 1u);
    EXPECT_EQ(a.v2.cols(), 2u);
    const SpectralSplit b = spectral_split(s, 2);
    EXPECT_EQ(b.sigma2, (DenseMatrix{{1}}));
    EXPECT_THROW(spectral_split(s, 0), ShapeError);
    EXPECT_THROW(spectral_split(s, 3), ShapeError);
}

TEST(SpectralSplit, TailNormMatchesSigma) {
    const SvdTriple s = svd_jacobi(random_matrix(12, 8, 31));
    const SpectralSplit sp = spectral_split(s, 3);
    double tail = 0.0;
    for (std::size_t j = 3; j < 8; ++j) tail += s.sigma[j] * s.sigma[j];
    EXPECT_NEAR(std::pow(frobenius_norm(sp.sigma2), 2), tail, 1e-12 * tail);
}

TEST(PseudoInverse, IdentityAndDiagonal) {
    EXPECT_LE(max_abs_diff(pseudo_inverse(eye(3, 3)), eye(3, 3)), 1e-14);
    EXPECT_LE(max_abs_diff(pseudo_inverse(DenseMatrix{{2, 0}, {0, 0}}), DenseMatrix{{0.5, 0}, {0, 0}}),
              1e-14);
}

TEST(PseudoInverse, PenroseIdentities) {
    const DenseMatrix a = random_matrix(5, 8, 77);
    const DenseMatrix p = pseudo_inverse(a);
    EXPECT_LE(frobenius_norm(matmul(matmul(a, p), a) - a), 1e-8 * frobenius_norm(a));
    EXPECT_LE(max_abs(matmul(matmul(p, a), p) - p), 1e-8);
    const DenseMatrix ap = matmul(a, p), pa = matmul(p, a);
    EXPECT_LE(max_abs(ap - transpose(ap)), 1e-8);
    EXPECT_LE(max_abs(pa - transpose(pa)), 1e-8);
}

TEST(TruncatedSvd, FullRankReconstructs) {
    const DenseMatrix a = random_matrix(9, 6, 12);
    EXPECT_LE(frobenius_norm(truncated_svd(a, 6).reconstruct() - a), 1e-10 * frobenius_norm(a));
}

TEST(TruncatedSvd, EckartYoungOnDiagonal) {
    const DenseMatrix a{{3, 0, 0}, {0, 2, 0}, {0, 0, 1}};
    EXPECT_NEAR(frobenius_norm(a - truncated_svd(a, 1).reconstruct()), std::sqrt(5.0), 1e-14);
}

TEST(TruncatedSvd, ErrorEqualsTailNorm) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const DenseMatrix a = random_matrix(20, 14, 900 + seed);
        const SvdTriple s = svd_jacobi(a);
        const std::size_t k = 1 + seed % 13;
        double tail = 0.0;
        for (std::size_t j = k; j < s.sigma.size(); ++j) tail += s.sigma[j] * s.sigma[j];
        const double err = frobenius_norm(a - truncated_svd(a, k).reconstruct());
        EXPECT_NEAR(err, std::sqrt(tail), 1e-9 * std::sqrt(tail));
    }
}

TEST(TruncatedSvd, RejectsBadRank) {
    EXPECT_THROW(truncated_svd(eye(3, 3), 0), ShapeError);
    EXPECT_THROW(truncated_svd(eye(3, 3), 4), ShapeError);
}

#include <gtest/gtest.h>

#include <cmath>

#include "rcsvd/analysis.hpp"
#include "rcsvd/synth.hpp"
#include "test_helpers.hpp"

using namespace rcsvd;

TEST(ProductMatrix, RankOneHasParallelColumns) {
    const DenseMatrix m = gen_product_matrix({SpectrumKind::product_rank, 6, 5, 1, 4});
    const double scale = max_abs(m) * max_abs(m);
    for (std::size_t i = 0; i + 1 < 6; ++i)
        for (std::size_t j = 0; j + 1 < 5; ++j) {
            const double minor = m(i, j) * m(i + 1, j + 1) - m(i, j + 1) * m(i + 1, j);
            EXPECT_LE(std::abs(minor), 1e-10 * scale);
        }
}

TEST(ProductMatrix, OracleRankCheck) {
    const DenseMatrix m = gen_product_matrix({SpectrumKind::product_rank, 60, 60, 30, 5});
    const std::vector<double> s = svd_jacobi(m).sigma;
    EXPECT_GT(s[29], 1e-8 * s[0]);
    EXPECT_LT(s[30], 1e-10 * s[0]);
}

TEST(ProductMatrix, Deterministic) {
    const SpectrumSpec spec{SpectrumKind::product_rank, 10, 8, 3, 12};
    EXPECT_EQ(gen_product_matrix(spec), gen_product_matrix(spec));
}

TEST(ProductMatrix, OversizedRankIsANoteNotAFailure) {
    const SpectrumSpec spec{SpectrumKind::product_rank, 5, 4, 9, 1};
    EXPECT_EQ(spec.notes().size(), 1u);
    EXPECT_NO_THROW(gen_product_matrix(spec));
    EXPECT_THROW(gen_product_matrix({SpectrumKind::product_rank, 5, 4, 0, 1}), PreconditionError);
}

TEST(NoisyLowRank, NoiseFreeSpectrumIsLinearRamp) {
    const DenseMatrix a = gen_noisy_low_rank(40, 20, 7, 0.0);
    const std::vector<double> s = svd_jacobi(a).sigma;
    const std::vector<double> ramp = linear_ramp_spectrum(20);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(s[i], ramp[i], 1e-9);
    for (std::size_t i = 20; i < 40; ++i) EXPECT_LE(s[i], 1e-9);
    EXPECT_DOUBLE_EQ(ramp.front(), 1.0);
    EXPECT_NEAR(ramp.back(), 1e-9, 1e-20);
}

TEST(NoisyLowRank, ThousandSizeGenerates) {
    const DenseMatrix a = gen_noisy_low_rank(1000, 20, 1);
    EXPECT_EQ(a.rows(), 1000u);
    EXPECT_TRUE(all_finite(a));
}

TEST(NoisyLowRank, Preconditions) {
    EXPECT_THROW(gen_noisy_low_rank(10, 10, 0), PreconditionError);
    EXPECT_THROW(gen_noisy_low_rank(10, 0, 0), PreconditionError);
}

TEST(RandomOrthonormal, Orthonormal) {
    RngState rng(5);
    EXPECT_LE(rcsvd::testing::orthonormality_defect(random_orthonormal(rng, 50, 50)), 1e-12);
    EXPECT_LE(rcsvd::testing::orthonormality_defect(random_orthonormal(rng, 50, 7)), 1e-12);
}

TEST(Decaying, SpectrumIsHarmonic) {
    const DenseMatrix a = gen_decaying(50, 3);
    const std::vector<double> s = svd_jacobi(a).sigma;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        EXPECT_NEAR(s[i], 1.0 / static_cast<double>(i + 1), 1e-10);
        sum_sq += 1.0 / std::pow(static_cast<double>(i + 1), 2);
    }
    EXPECT_NEAR(std::pow(frobenius_norm(a), 2), sum_sq, 1e-10 * sum_sq);
}

TEST(Decaying, ThousandSizeGeneratesAndIsDeterministic) {
    const DenseMatrix a = gen_decaying(1000, 9);
    EXPECT_TRUE(all_finite(a));
    EXPECT_EQ(gen_decaying(30, 2), gen_decaying(30, 2));
    EXPECT_THROW(gen_decaying(1, 0), PreconditionError);
}

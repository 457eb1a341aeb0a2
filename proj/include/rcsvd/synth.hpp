#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rcsvd/matrix.hpp"
#include "rcsvd/qr.hpp"
#include "rcsvd/random.hpp"

namespace rcsvd {

enum class SpectrumKind { product_rank, noisy_low_rank, decaying };

struct SpectrumSpec {
    SpectrumKind kind = SpectrumKind::product_rank;
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t rank = 0; // r1 for product-rank, k for noisy-low-rank
    std::uint64_t seed = 0;

    /// Non-fatal remarks about the parameters (e.g. a rank that cannot be
    /// attained by the requested shape).
    std::vector<std::string> notes() const {
        std::vector<std::string> out;
        if (kind == SpectrumKind::product_rank && (rank > m || rank > n)) {
            out.push_back("r1=" + std::to_string(rank) + " exceeds min(m, n); the product has rank " +
                          std::to_string(std::min(m, n)));
        }
        return out;
    }
};

/// n x cols matrix with orthonormal columns: Q factor of a Gaussian draw.
inline DenseMatrix random_orthonormal(RngState& rng, std::size_t n, std::size_t cols) {
    return qr_householder(gaussian_matrix(rng, n, cols)).q;
}

/// M = randn(m, r1) * randn(r1, n), both factors from one stream seeded by
/// spec.seed. An r1 above min(m, n) is accepted (see SpectrumSpec::notes).
inline DenseMatrix gen_product_matrix(const SpectrumSpec& spec) {
    if (spec.kind != SpectrumKind::product_rank)
        throw PreconditionError("gen_product_matrix: spec kind must be product-rank");
    if (spec.rank < 1) throw PreconditionError("gen_product_matrix: r1 must be >= 1");
    RngState rng(spec.seed);
    const DenseMatrix left = gaussian_matrix(rng, spec.m, spec.rank);
    const DenseMatrix right = gaussian_matrix(rng, spec.rank, spec.n);
    return matmul(left, right);
}

/// k values decreasing linearly from 1 to 1e-9.
inline std::vector<double> linear_ramp_spectrum(std::size_t k) {
    std::vector<double> out(k, 1.0);
    for (std::size_t i = 1; i < k; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(k - 1);
        out[i] = (1.0 - f) + f * 1e-9;
    }
    return out;
}

/// Noise term of the noisy low-rank family: i.i.d. N(0, 1) entries scaled
/// by 1/sqrt(n), which puts the largest singular value near 2.
inline DenseMatrix normalized_gaussian(RngState& rng, std::size_t n) {
    return (1.0 / std::sqrt(static_cast<double>(n))) * gaussian_matrix(rng, n, n);
}

/**
 * n x n matrix U * diag(s) * Vᵀ + noise_scale * s_k * G with s a linear
 * ramp from 1 to 1e-9 over the first k entries and zero beyond, U and V
 * random orthonormal. noise_scale = 0 gives the exact low-rank matrix.
 */
inline DenseMatrix gen_noisy_low_rank(std::size_t n, std::size_t k, std::uint64_t seed,
                                      double noise_scale = 0.1) {
    if (k < 1 || k >= n)
        throw PreconditionError("gen_noisy_low_rank: need 1 <= k < n, got k=" +
                                std::to_string(k) + ", n=" + std::to_string(n));
    RngState rng(seed);
    // Only the first k columns of U and V meet a nonzero singular value.
    DenseMatrix u = random_orthonormal(rng, n, k);
    const DenseMatrix v = random_orthonormal(rng, n, k);
    const std::vector<double> sigma = linear_ramp_spectrum(k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) u(i, j) *= sigma[j];
    DenseMatrix a = matmul_nt(u, v);
    if (noise_scale != 0.0) a = a + (noise_scale * sigma.back()) * normalized_gaussian(rng, n);
    return a;
}

/// n x n matrix U * diag(1, 1/2, ..., 1/n) * Vᵀ with random orthonormal U, V.
inline DenseMatrix gen_decaying(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw PreconditionError("gen_decaying: need n >= 2");
    RngState rng(seed);
    DenseMatrix u = random_orthonormal(rng, n, n);
    const DenseMatrix v = random_orthonormal(rng, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) u(i, j) /= static_cast<double>(j + 1);
    return matmul_nt(u, v);
}

} // namespace rcsvd

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "rcsvd/app/bench.hpp"
#include "rcsvd/io/pgm.hpp"
#include "rcsvd/ldr.hpp"
#include "rcsvd/random.hpp"

namespace rcsvd {

inline DenseMatrix to_matrix(const GrayImage& img) {
    DenseMatrix a(img.height, img.width);
    for (std::size_t i = 0; i < img.height; ++i)
        for (std::size_t j = 0; j < img.width; ++j) a(i, j) = img.at(i, j);
    return a;
}

/// Rounds to the nearest integer and clamps to [0, 255].
inline GrayImage to_image(const DenseMatrix& a) {
    GrayImage img{a.cols(), a.rows(), std::vector<std::uint8_t>(a.size())};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            img.at(i, j) = static_cast<std::uint8_t>(std::clamp(std::nearbyint(a(i, j)), 0.0, 255.0));
    return img;
}

/// Peak signal-to-noise ratio in dB for 8-bit images; +inf when identical.
inline double psnr(const GrayImage& a, const GrayImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw ShapeError("psnr: image sizes differ");
    double sse = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(a.pixels.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

struct CompressionResult {
    GrayImage image;
    BenchRecord record;
};

struct CompressionOptions {
    std::size_t k = 100;
    std::string algorithm = "rcsvd-qr";
    std::size_t iterations = 5;
    std::size_t oversampling = 10;
    std::uint64_t seed = 0;
};

/**
 * Rank-k approximation of an image. The randomized algorithms sketch with
 * k + p columns (p shrunk if the image is too small, k raised to the
 * minimum of 2) and keep the k factors with the largest diagonal entries.
 * The record's time covers the factorization only.
 */
inline CompressionResult compress_image(const GrayImage& img, const CompressionOptions& opt) {
    const std::size_t dim = std::min(img.width, img.height);
    if (opt.k < 1 || opt.k > dim) {
        throw ShapeError("compress_image: k=" + std::to_string(opt.k) + " outside [1, " +
                         std::to_string(dim) + "]");
    }
    if (!is_algorithm(opt.algorithm))
        throw PreconditionError("compress_image: unknown algorithm '" + opt.algorithm + "'");

    const DenseMatrix a = to_matrix(img);
    const bool randomized = opt.algorithm == "rsvd" || opt.algorithm == "rcsvd-qr";
    SketchConfig cfg{opt.k, opt.oversampling, opt.iterations, opt.seed};
    if (randomized) {
        cfg.target_rank = std::max<std::size_t>(opt.k, 2);
        if (cfg.target_rank + 2 > dim) {
            throw ShapeError("compress_image: k=" + std::to_string(opt.k) +
                             " leaves no room for oversampling in a " + std::to_string(dim) +
                             "-pixel dimension; use svd");
        }
        cfg.oversampling = std::min(cfg.oversampling, dim - cfg.target_rank);
    }

    LdrDecomposition dec;
    BenchRecord rec{opt.algorithm, a.rows(), a.cols(), opt.k, randomized ? cfg.oversampling : 0,
                    opt.iterations, 0.0, 0.0, opt.seed};
    rec.wall_time_ms = time_ms([&] {
        dec = run_algorithm(opt.algorithm, a, cfg);
        if (dec.rank() > opt.k) dec = truncate_leading(dec, opt.k);
    });
    const DenseMatrix approx = dec.reconstruct();
    const double norm = frobenius_norm(a);
    rec.residual_rel = norm > 0.0 ? frobenius_norm(a - approx) / norm : 0.0;
    return CompressionResult{to_image(approx), rec};
}

/**
 * Deterministic photograph-like test image: a smooth shaded background,
 * soft blobs, a few hard-edged shapes, an oriented grating and mild
 * Gaussian sensor noise.
 */
inline GrayImage generate_test_image(std::size_t width, std::size_t height, std::uint64_t seed) {
    RngState rng(seed);
    const double w = static_cast<double>(width);
    const double h = static_cast<double>(height);
    DenseMatrix field(height, width);

    const double gx = rng.next_uniform() - 0.5, gy = rng.next_uniform() - 0.5;
    for (std::size_t i = 0; i < height; ++i)
        for (std::size_t j = 0; j < width; ++j)
            field(i, j) = 110.0 + 60.0 * (gx * j / w + gy * i / h);

    for (int b = 0; b < 12; ++b) {
        const double cx = rng.next_uniform() * w, cy = rng.next_uniform() * h;
        const double radius = (0.04 + 0.2 * rng.next_uniform()) * std::min(w, h);
        const double amp = 80.0 * (rng.next_uniform() - 0.5);
        for (std::size_t i = 0; i < height; ++i)
            for (std::size_t j = 0; j < width; ++j) {
                const double dx = (j - cx) / radius, dy = (i - cy) / radius;
                field(i, j) += amp * std::exp(-0.5 * (dx * dx + dy * dy));
            }
    }

    for (int s = 0; s < 6; ++s) {
        const double cx = rng.next_uniform() * w, cy = rng.next_uniform() * h;
        const double rx = (0.03 + 0.12 * rng.next_uniform()) * w;
        const double ry = (0.03 + 0.12 * rng.next_uniform()) * h;
        const double amp = 100.0 * (rng.next_uniform() - 0.5);
        const bool disc = s % 2 == 0;
        for (std::size_t i = 0; i < height; ++i)
            for (std::size_t j = 0; j < width; ++j) {
                const double dx = (j - cx) / rx, dy = (i - cy) / ry;
                const bool inside = disc ? dx * dx + dy * dy <= 1.0
                                         : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
                if (inside) field(i, j) += amp;
            }
    }

    const double angle = std::numbers::pi * rng.next_uniform();
    const double freq = 2.0 * std::numbers::pi / (8.0 + 24.0 * rng.next_uniform());
    for (std::size_t i = 0; i < height; ++i)
        for (std::size_t j = 0; j < width; ++j) {
            const double u = std::cos(angle) * j + std::sin(angle) * i;
            const double envelope = std::exp(-std::pow((i - h / 2) / (0.3 * h), 2));
            field(i, j) += 12.0 * envelope * std::sin(freq * u);
        }

    for (double& v : field.values()) v += 3.0 * rng.next_gaussian();
    return to_image(field);
}

} // namespace rcsvd

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "rcsvd/matrix.hpp"

namespace rcsvd {

/// One step of SplitMix64; used for seeding and for deriving child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Child seed for an independent stream: (seed, stream index) -> seed.
constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
    splitmix64(s);
    return splitmix64(s);
}

/**
 * Seeded generator: xoshiro256** for uniforms, Box-Muller for normals.
 *
 * The 256-bit state is filled from the 64-bit seed by four SplitMix64
 * steps. Normals are produced in pairs; the second value of each pair is
 * cached and returned by the next call. Identical seeds give identical
 * streams.
 */
class RngState {
public:
    explicit RngState(std::uint64_t seed) noexcept : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0, 1): 53 random bits, offset by half an ulp so 0 is excluded.
    double next_uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_gaussian() noexcept {
        if (spare_) {
            const double out = *spare_;
            spare_.reset();
            return out;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        return radius * std::cos(angle);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::array<std::uint64_t, 4> s_{};
    std::optional<double> spare_;
};

/// rows x cols matrix of i.i.d. standard normals, filled column by column.
inline DenseMatrix gaussian_matrix(RngState& state, std::size_t rows, std::size_t cols) {
    DenseMatrix out(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) out(i, j) = state.next_gaussian();
    return out;
}

} // namespace rcsvd

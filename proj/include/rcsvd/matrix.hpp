#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rcsvd/error.hpp"

namespace rcsvd {

/**
 * Dense row-major matrix of doubles.
 *
 * A default-constructed matrix is an empty placeholder (0x0); every sized
 * constructor requires at least one row and one column.
 */
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols), 0.0) {}

    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != checked_size(rows, cols)) {
            std::ostringstream msg;
            msg << "DenseMatrix: " << rows << "x" << cols << " needs " << rows * cols
                << " values, got " << data_.size();
            throw ShapeError(msg.str());
        }
    }

    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        checked_size(rows_, cols_);
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) throw ShapeError("DenseMatrix: ragged initializer list");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    std::string shape() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    static std::size_t checked_size(std::size_t rows, std::size_t cols) {
        if (rows == 0 || cols == 0) {
            throw ShapeError("DenseMatrix: dimensions must be positive, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
        }
        return rows * cols;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Rectangular identity: ones on the leading diagonal, zeros elsewhere.
inline DenseMatrix eye(std::size_t rows, std::size_t cols) {
    DenseMatrix out(rows, cols);
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) out(i, i) = 1.0;
    return out;
}

inline DenseMatrix diagonal(std::span<const double> values) {
    DenseMatrix out(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
    return out;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix out(a.cols(), a.rows());
    constexpr std::size_t tile = 32;
    for (std::size_t i0 = 0; i0 < a.rows(); i0 += tile) {
        const std::size_t i1 = std::min(i0 + tile, a.rows());
        for (std::size_t j0 = 0; j0 < a.cols(); j0 += tile) {
            const std::size_t j1 = std::min(j0 + tile, a.cols());
            for (std::size_t i = i0; i < i1; ++i)
                for (std::size_t j = j0; j < j1; ++j) out(j, i) = a(i, j);
        }
    }
    return out;
}

/// Matrix product a*b. The loops are tiled over k and j for cache reuse;
/// every output entry is still accumulated in increasing k order, so the
/// result is bitwise reproducible and independent of the tile sizes.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ (" + a.shape() + " times " +
                         b.shape() + ")");
    }
    constexpr std::size_t k_tile = 128;
    constexpr std::size_t j_tile = 512;
    DenseMatrix out(a.rows(), b.cols());
    const std::size_t inner = a.cols();
    const std::size_t n = b.cols();
    for (std::size_t k0 = 0; k0 < inner; k0 += k_tile) {
        const std::size_t k1 = std::min(k0 + k_tile, inner);
        for (std::size_t j0 = 0; j0 < n; j0 += j_tile) {
            const std::size_t len = std::min(j0 + j_tile, n) - j0;
            for (std::size_t i = 0; i < a.rows(); ++i) {
                double* __restrict dst = out.row(i).data() + j0;
                const double* arow = a.row(i).data();
                for (std::size_t k = k0; k < k1; ++k) {
                    const double aik = arow[k];
                    if (aik == 0.0) continue;
                    const double* __restrict src = b.row(k).data() + j0;
                    for (std::size_t j = 0; j < len; ++j) dst[j] += aik * src[j];
                }
            }
        }
    }
    return out;
}

/// aᵀ*b.
inline DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_tn: row counts differ (" + a.shape() + " transposed times " +
                         b.shape() + ")");
    }
    return matmul(transpose(a), b);
}

/// a*bᵀ.
inline DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_nt: column counts differ (" + a.shape() + " times " +
                         b.shape() + " transposed)");
    }
    return matmul(a, transpose(b));
}

inline DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError("add: shapes differ (" + a.shape() + " vs " + b.shape() + ")");
    DenseMatrix out = a;
    auto dst = out.values();
    auto src = b.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    return out;
}

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError("subtract: shapes differ (" + a.shape() + " vs " + b.shape() + ")");
    DenseMatrix out = a;
    auto dst = out.values();
    auto src = b.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
    return out;
}

inline DenseMatrix operator*(double s, DenseMatrix a) {
    for (double& x : a.values()) x *= s;
    return a;
}

/// Frobenius norm with scaling so that huge or tiny entries neither overflow
/// nor underflow.
inline double frobenius_norm(const DenseMatrix& a) {
    double scale = 0.0;
    double ssq = 1.0;
    for (double x : a.values()) {
        if (x == 0.0) continue;
        const double ax = std::abs(x);
        if (scale < ax) {
            ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
            scale = ax;
        } else {
            ssq += (ax / scale) * (ax / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

inline double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double x : a.values()) m = std::max(m, std::abs(x));
    return m;
}

inline bool all_finite(const DenseMatrix& a) {
    return std::all_of(a.values().begin(), a.values().end(),
                       [](double x) { return std::isfinite(x); });
}

/// Contiguous sub-block starting at (row0, col0).
inline DenseMatrix block(const DenseMatrix& a, std::size_t row0, std::size_t col0,
                         std::size_t rows, std::size_t cols) {
    if (row0 + rows > a.rows() || col0 + cols > a.cols()) {
        throw ShapeError("block: " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " at (" + std::to_string(row0) + "," + std::to_string(col0) +
                         ") exceeds " + a.shape());
    }
    DenseMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        std::copy_n(a.row(row0 + i).begin() + static_cast<std::ptrdiff_t>(col0), cols,
                    out.row(i).begin());
    return out;
}

inline DenseMatrix select_columns(const DenseMatrix& a, std::span<const std::size_t> idx) {
    DenseMatrix out(a.rows(), idx.size());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = a(i, idx[j]);
    return out;
}

inline DenseMatrix select_rows(const DenseMatrix& a, std::span<const std::size_t> idx) {
    DenseMatrix out(idx.size(), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        std::copy(a.row(idx[i]).begin(), a.row(idx[i]).end(), out.row(i).begin());
    return out;
}

} // namespace rcsvd

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "rcsvd/matrix.hpp"

namespace rcsvd {

/**
 * Low-rank factorization A ~ L * D * R.
 *
 * l is m x r with orthonormal columns, r_factor is r x n with orthonormal
 * rows, and d is r x r. For the QR-iteration algorithms d is lower
 * triangular (the transpose of a QR triangular factor) and only tends to a
 * diagonal matrix as the iteration count grows; for SVD-based algorithms it
 * is diagonal. diag_d holds d's diagonal in iteration order.
 */
struct LdrDecomposition {
    DenseMatrix l;
    DenseMatrix d;
    DenseMatrix r_factor;
    std::vector<double> diag_d;
    std::size_t iterations_run = 0;

    std::size_t rank() const noexcept { return d.rows(); }

    /// diag_d reordered by descending magnitude.
    std::vector<double> sorted_diag() const {
        std::vector<double> out = diag_d;
        std::sort(out.begin(), out.end(),
                  [](double x, double y) { return std::abs(x) > std::abs(y); });
        return out;
    }

    DenseMatrix reconstruct() const { return matmul(matmul(l, d), r_factor); }
};

inline std::vector<double> diagonal_of(const DenseMatrix& d) {
    std::vector<double> out(std::min(d.rows(), d.cols()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = d(i, i);
    return out;
}

/**
 * Keeps the k entries of diag_d with the largest magnitude, together with
 * the matching columns of l, rows of r_factor, and the k x k sub-block of d.
 * Kept entries retain their original relative order.
 */
inline LdrDecomposition truncate_leading(const LdrDecomposition& dec, std::size_t k) {
    if (k == 0 || k > dec.rank()) {
        throw ShapeError("truncate_leading: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(dec.rank()) + "]");
    }
    std::vector<std::size_t> order(dec.rank());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(dec.diag_d[a]) > std::abs(dec.diag_d[b]);
    });
    order.resize(k);
    std::sort(order.begin(), order.end());

    LdrDecomposition out;
    out.l = select_columns(dec.l, order);
    out.r_factor = select_rows(dec.r_factor, order);
    out.d = DenseMatrix(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) out.d(i, j) = dec.d(order[i], order[j]);
    out.diag_d = diagonal_of(out.d);
    out.iterations_run = dec.iterations_run;
    return out;
}

} // namespace rcsvd

// Factorize a matrix with a rapidly decaying spectrum and compare the
// estimated singular values with the exact ones.

#include <cmath>
#include <cstdio>

#include "rcsvd/rcsvd.hpp"

int main() {
    using namespace rcsvd;

    const DenseMatrix a = gen_decaying(300, /*seed=*/7);
    const SketchConfig cfg{/*target_rank=*/10, /*oversampling=*/10, /*iterations=*/5, /*seed=*/1};

    const SketchedFactorization f = rcsvd_qr_detailed(a, cfg);
    const std::vector<double> estimate = f.ldr.sorted_diag();
    const std::vector<double> exact = svd_jacobi(a).sigma;

    std::printf("%4s %14s %14s\n", "i", "estimate", "exact");
    for (std::size_t i = 0; i < cfg.target_rank; ++i)
        std::printf("%4zu %14.8f %14.8f\n", i + 1, std::abs(estimate[i]), exact[i]);

    std::printf("residual |A - LDR|_F      = %.6e\n", residual_error(a, f.ldr));
    std::printf("projection |A - WW^T A|_F = %.6e\n", projection_residual(a, f.basis));
    return 0;
}

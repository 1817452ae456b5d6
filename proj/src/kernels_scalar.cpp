// Scalar reference kernels. These define the semantics the SIMD variants are
// equivalence-tested against; keep them as plain loops.

#include "sepstab/kernels.hpp"

namespace sepstab::kernels {

namespace {

void axpy_scalar(std::size_t n, cdouble a, const cdouble* x, cdouble* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(std::size_t n, cdouble a, const cdouble* x, cdouble* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

cdouble dotc_scalar(std::size_t n, const cdouble* x, const cdouble* y) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

cdouble dotu_scalar(std::size_t n, const cdouble* x, const cdouble* y) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
    }
    return {re, im};
}

double norm2_scalar(std::size_t n, const cdouble* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

// Row-major ikl ordering: the inner loop over columns of B is a contiguous
// fused multiply-add, the same access pattern the AVX2 kernel vectorizes.
void gemm_acc_scalar(std::size_t m, std::size_t k, std::size_t n,
                     const cdouble* A, const cdouble* B, cdouble* C) {
    for (std::size_t i = 0; i < m; ++i) {
        cdouble* crow = C + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const cdouble a = A[i * k + l];
            if (a == cdouble{0.0, 0.0}) continue;
            const cdouble* brow = B + l * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += a * brow[j];
        }
    }
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops = {axpy_scalar, scal_scalar,   dotc_scalar,
                            dotu_scalar, norm2_scalar, gemm_acc_scalar,
                            "scalar"};
    return ops;
}

} // namespace sepstab::kernels

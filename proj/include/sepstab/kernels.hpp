#pragma once

#include <complex>
#include <cstddef>

namespace sepstab::kernels {

using cdouble = std::complex<double>;

// Data-parallel complex-double primitives behind all dense linear algebra.
// Every entry has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized one; the active table is picked once at runtime.
//
//   axpy      y[i] += a * x[i]
//   scal      out[i] = a * x[i]
//   dotc      sum_i conj(x[i]) * y[i]
//   dotu      sum_i x[i] * y[i]
//   norm2     sum_i |x[i]|^2
//   gemm_acc  C (m x n) += A (m x k) * B (k x n), row-major contiguous
struct Ops {
    void (*axpy)(std::size_t n, cdouble a, const cdouble* x, cdouble* y);
    void (*scal)(std::size_t n, cdouble a, const cdouble* x, cdouble* out);
    cdouble (*dotc)(std::size_t n, const cdouble* x, const cdouble* y);
    cdouble (*dotu)(std::size_t n, const cdouble* x, const cdouble* y);
    double (*norm2)(std::size_t n, const cdouble* x);
    void (*gemm_acc)(std::size_t m, std::size_t k, std::size_t n,
                     const cdouble* A, const cdouble* B, cdouble* C);
    const char* name;
};

// Reference kernels, always available.
const Ops& scalar_ops();

// AVX2+FMA kernels; nullptr when not compiled in or the CPU lacks support.
const Ops* avx2_ops();

// Active table: AVX2 when available, else scalar. The SEPSTAB_KERNELS
// environment variable ("scalar"/"avx2"/"auto") overrides, checked once.
const Ops& active();
const char* active_name();

} // namespace sepstab::kernels

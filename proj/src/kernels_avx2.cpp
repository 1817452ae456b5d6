// AVX2+FMA kernels. One __m256d holds two complex doubles as
// [re0, im0, re1, im1]; complex multiply uses the fmaddsub / lane-swap idiom.
// This translation unit is compiled with -mavx2 -mfma; callers must go
// through the dispatch table, which checks CPU support first.

#include "sepstab/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define SEPSTAB_HAVE_AVX2_TU 1
#include <immintrin.h>
#else
#define SEPSTAB_HAVE_AVX2_TU 0
#endif

namespace sepstab::kernels {

#if SEPSTAB_HAVE_AVX2_TU

namespace {

inline const double* dp(const cdouble* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cdouble* p) { return reinterpret_cast<double*>(p); }

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// (a.re + i a.im) * v for two packed complexes.
inline __m256d cmul_broadcast(__m256d va_re, __m256d va_im, __m256d v) {
    __m256d v_swap = _mm256_permute_pd(v, 0x5);  // [im0, re0, im1, re1]
    return _mm256_fmaddsub_pd(va_re, v, _mm256_mul_pd(va_im, v_swap));
}

void axpy_avx2(std::size_t n, cdouble a, const cdouble* x, cdouble* y) {
    const __m256d va_re = _mm256_set1_pd(a.real());
    const __m256d va_im = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d vx = _mm256_loadu_pd(dp(x + i));
        __m256d vy = _mm256_loadu_pd(dp(y + i));
        vy = _mm256_add_pd(vy, cmul_broadcast(va_re, va_im, vx));
        _mm256_storeu_pd(dp(y + i), vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scal_avx2(std::size_t n, cdouble a, const cdouble* x, cdouble* out) {
    const __m256d va_re = _mm256_set1_pd(a.real());
    const __m256d va_im = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d vx = _mm256_loadu_pd(dp(x + i));
        _mm256_storeu_pd(dp(out + i), cmul_broadcast(va_re, va_im, vx));
    }
    for (; i < n; ++i) out[i] = a * x[i];
}

// For both dot products we accumulate the elementwise products
//   vrr = sum x .* y          lanes [xr*yr, xi*yi, ...]
//   vri = sum swap(x) .* y    lanes [xi*yr, xr*yi, ...]
// and combine lanes at the end with the sign pattern of the variant.
void dot_accumulate(std::size_t n, const cdouble* x, const cdouble* y,
                    __m256d& vrr, __m256d& vri, std::size_t& done) {
    vrr = _mm256_setzero_pd();
    vri = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d vx = _mm256_loadu_pd(dp(x + i));
        __m256d vy = _mm256_loadu_pd(dp(y + i));
        vrr = _mm256_fmadd_pd(vx, vy, vrr);
        vri = _mm256_fmadd_pd(_mm256_permute_pd(vx, 0x5), vy, vri);
    }
    done = i;
}

const __m256d kNegEven = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);  // flips lanes 0,2
const __m256d kNegOdd = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);   // flips lanes 1,3

cdouble dotc_avx2(std::size_t n, const cdouble* x, const cdouble* y) {
    __m256d vrr, vri;
    std::size_t i;
    dot_accumulate(n, x, y, vrr, vri, i);
    // conj(x)*y: re = xr*yr + xi*yi, im = xr*yi - xi*yr
    double re = hsum(vrr);
    double im = hsum(_mm256_xor_pd(vri, kNegEven));
    for (; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

cdouble dotu_avx2(std::size_t n, const cdouble* x, const cdouble* y) {
    __m256d vrr, vri;
    std::size_t i;
    dot_accumulate(n, x, y, vrr, vri, i);
    // x*y: re = xr*yr - xi*yi, im = xr*yi + xi*yr
    double re = hsum(_mm256_xor_pd(vrr, kNegOdd));
    double im = hsum(vri);
    for (; i < n; ++i) {
        re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
    }
    return {re, im};
}

double norm2_avx2(std::size_t n, const cdouble* x) {
    __m256d vacc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d vx = _mm256_loadu_pd(dp(x + i));
        vacc = _mm256_fmadd_pd(vx, vx, vacc);
    }
    double acc = hsum(vacc);
    for (; i < n; ++i)
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

void gemm_acc_avx2(std::size_t m, std::size_t k, std::size_t n,
                   const cdouble* A, const cdouble* B, cdouble* C) {
    for (std::size_t i = 0; i < m; ++i) {
        cdouble* crow = C + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const cdouble a = A[i * k + l];
            if (a == cdouble{0.0, 0.0}) continue;
            const cdouble* brow = B + l * n;
            const __m256d va_re = _mm256_set1_pd(a.real());
            const __m256d va_im = _mm256_set1_pd(a.imag());
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d vb0 = _mm256_loadu_pd(dp(brow + j));
                __m256d vb1 = _mm256_loadu_pd(dp(brow + j + 2));
                __m256d vc0 = _mm256_loadu_pd(dp(crow + j));
                __m256d vc1 = _mm256_loadu_pd(dp(crow + j + 2));
                vc0 = _mm256_add_pd(vc0, cmul_broadcast(va_re, va_im, vb0));
                vc1 = _mm256_add_pd(vc1, cmul_broadcast(va_re, va_im, vb1));
                _mm256_storeu_pd(dp(crow + j), vc0);
                _mm256_storeu_pd(dp(crow + j + 2), vc1);
            }
            for (; j + 2 <= n; j += 2) {
                __m256d vb = _mm256_loadu_pd(dp(brow + j));
                __m256d vc = _mm256_loadu_pd(dp(crow + j));
                _mm256_storeu_pd(dp(crow + j),
                                 _mm256_add_pd(vc, cmul_broadcast(va_re, va_im, vb)));
            }
            for (; j < n; ++j) crow[j] += a * brow[j];
        }
    }
}

} // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
        return nullptr;
    static const Ops ops = {axpy_avx2, scal_avx2,  dotc_avx2,
                            dotu_avx2, norm2_avx2, gemm_acc_avx2,
                            "avx2"};
    return &ops;
}

#else

const Ops* avx2_ops() { return nullptr; }

#endif // SEPSTAB_HAVE_AVX2_TU

} // namespace sepstab::kernels

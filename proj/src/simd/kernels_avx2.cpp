// AVX2 + FMA kernels. This translation unit is compiled without -mavx2;
// each function carries a target attribute so the rest of the binary stays
// runnable on older CPUs and dispatch happens at runtime.

#include "pepsmqc/simd/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define PEPSMQC_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace pepsmqc::simd {

#ifdef PEPSMQC_HAVE_AVX2_KERNELS
namespace {

#define PEPSMQC_AVX2 __attribute__((target("avx2,fma")))

// Two complex numbers per register: [re0, im0, re1, im1].

PEPSMQC_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// (even lanes) - (odd lanes), summed.
PEPSMQC_AVX2 inline double hsum_even_minus_odd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_sub_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

PEPSMQC_AVX2 cplx dotc_avx2(const cplx* x, const cplx* y, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    const double* yp = reinterpret_cast<const double*>(y);
    __m256d acc_direct = _mm256_setzero_pd();   // [xr*yr, xi*yi, ...]
    __m256d acc_swapped = _mm256_setzero_pd();  // [xr*yi, xi*yr, ...]
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = _mm256_loadu_pd(xp + 2 * i);
        const __m256d vy = _mm256_loadu_pd(yp + 2 * i);
        const __m256d vy_swap = _mm256_permute_pd(vy, 0b0101);
        acc_direct = _mm256_fmadd_pd(vx, vy, acc_direct);
        acc_swapped = _mm256_fmadd_pd(vx, vy_swap, acc_swapped);
    }
    double re = hsum(acc_direct);
    double im = hsum_even_minus_odd(acc_swapped);
    for (; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

PEPSMQC_AVX2 void axpy_avx2(cplx a, const cplx* x, cplx* y, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    double* yp = reinterpret_cast<double*>(y);
    const __m256d are = _mm256_set1_pd(a.real());
    const __m256d aim = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = _mm256_loadu_pd(xp + 2 * i);
        const __m256d vx_swap = _mm256_permute_pd(vx, 0b0101);
        const __m256d t = _mm256_mul_pd(aim, vx_swap);
        const __m256d prod = _mm256_fmaddsub_pd(are, vx, t);
        _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), prod));
    }
    for (; i < n; ++i) {
        y[i] += a * x[i];
    }
}

PEPSMQC_AVX2 double norm2_avx2(const cplx* x, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = _mm256_loadu_pd(xp + 2 * i);
        acc = _mm256_fmadd_pd(vx, vx, acc);
    }
    double out = hsum(acc);
    for (; i < n; ++i) {
        out += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    }
    return out;
}

// sum_j a_j * x_j (no conjugation) from separate accumulators.
PEPSMQC_AVX2 inline cplx finish_product(__m256d acc_direct, __m256d acc_swapped) {
    return {hsum_even_minus_odd(acc_direct), hsum(acc_swapped)};
}

PEPSMQC_AVX2 void gemv_avx2(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x,
                            cplx* y) {
    const double* xp = reinterpret_cast<const double*>(x);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* ap = reinterpret_cast<const double*>(a + r * cols);
        __m256d acc_direct = _mm256_setzero_pd();
        __m256d acc_swapped = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 2 <= cols; c += 2) {
            const __m256d va = _mm256_loadu_pd(ap + 2 * c);
            const __m256d vx = _mm256_loadu_pd(xp + 2 * c);
            acc_direct = _mm256_fmadd_pd(va, vx, acc_direct);
            acc_swapped = _mm256_fmadd_pd(va, _mm256_permute_pd(vx, 0b0101), acc_swapped);
        }
        cplx acc = finish_product(acc_direct, acc_swapped);
        for (; c < cols; ++c) {
            acc += a[r * cols + c] * x[c];
        }
        y[r] = acc;
    }
}

PEPSMQC_AVX2 void csr_matvec_avx2(std::size_t rows, const int* outer, const int* inner,
                                  const cplx* values, const cplx* x, cplx* y) {
    const double* vp = reinterpret_cast<const double*>(values);
    const double* xp = reinterpret_cast<const double*>(x);
    for (std::size_t r = 0; r < rows; ++r) {
        __m256d acc_direct = _mm256_setzero_pd();
        __m256d acc_swapped = _mm256_setzero_pd();
        int k = outer[r];
        const int end = outer[r + 1];
        for (; k + 2 <= end; k += 2) {
            const __m256d va = _mm256_loadu_pd(vp + 2 * k);
            const __m128d x0 = _mm_loadu_pd(xp + 2 * inner[k]);
            const __m128d x1 = _mm_loadu_pd(xp + 2 * inner[k + 1]);
            const __m256d vx = _mm256_insertf128_pd(_mm256_castpd128_pd256(x0), x1, 1);
            acc_direct = _mm256_fmadd_pd(va, vx, acc_direct);
            acc_swapped = _mm256_fmadd_pd(va, _mm256_permute_pd(vx, 0b0101), acc_swapped);
        }
        cplx acc = finish_product(acc_direct, acc_swapped);
        for (; k < end; ++k) {
            acc += values[k] * x[inner[k]];
        }
        y[r] = acc;
    }
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable table{Isa::avx2, dotc_avx2, axpy_avx2, norm2_avx2, gemv_avx2,
                                   csr_matvec_avx2};
    return &table;
}

bool cpu_supports_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#else

const KernelTable* avx2_kernels() { return nullptr; }
bool cpu_supports_avx2() { return false; }

#endif

}  // namespace pepsmqc::simd

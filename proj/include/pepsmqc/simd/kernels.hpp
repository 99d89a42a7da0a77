#pragma once

// Complex double-precision inner-loop kernels with a scalar reference
// implementation and an AVX2/FMA variant picked at runtime.
//
// Layout is always interleaved std::complex<double> (re, im, re, im, ...).
// Set PEPS_MQC_SIMD=scalar to force the reference kernels.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace pepsmqc::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;
    /// sum_i conj(x_i) * y_i
    cplx (*dotc)(const cplx* x, const cplx* y, std::size_t n);
    /// y += a * x
    void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
    /// sum_i |x_i|^2
    double (*norm2)(const cplx* x, std::size_t n);
    /// y = A x for a row-major dense rows x cols matrix
    void (*gemv)(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y);
    /// y = A x for a CSR matrix (outer has rows + 1 entries)
    void (*csr_matvec)(std::size_t rows, const int* outer, const int* inner, const cplx* values,
                       const cplx* x, cplx* y);
};

const KernelTable& scalar_kernels();

/// nullptr when the build has no AVX2 variant.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

/// Kernel table used by the library. Resolved once from the CPU and the
/// PEPS_MQC_SIMD environment variable unless overridden by set_active().
const KernelTable& active();

/// Test hook; throws std::invalid_argument if the ISA is not available.
void set_active(Isa isa);

inline cplx dotc(std::span<const cplx> x, std::span<const cplx> y) {
    return active().dotc(x.data(), y.data(), x.size());
}
inline void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
    active().axpy(a, x.data(), y.data(), x.size());
}
inline double norm2(std::span<const cplx> x) { return active().norm2(x.data(), x.size()); }

}  // namespace pepsmqc::simd

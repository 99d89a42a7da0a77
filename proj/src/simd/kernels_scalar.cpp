#include "pepsmqc/simd/kernels.hpp"

namespace pepsmqc::simd {
namespace {

cplx dotc_scalar(const cplx* x, const cplx* y, std::size_t n) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

void axpy_scalar(cplx a, const cplx* x, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += a * x[i];
    }
}

double norm2_scalar(const cplx* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    }
    return acc;
}

void gemv_scalar(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const cplx* row = a + r * cols;
        cplx acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            acc += row[c] * x[c];
        }
        y[r] = acc;
    }
}

void csr_matvec_scalar(std::size_t rows, const int* outer, const int* inner, const cplx* values,
                       const cplx* x, cplx* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        cplx acc = 0.0;
        for (int k = outer[r]; k < outer[r + 1]; ++k) {
            acc += values[k] * x[inner[k]];
        }
        y[r] = acc;
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::scalar, dotc_scalar, axpy_scalar, norm2_scalar, gemv_scalar,
                                   csr_matvec_scalar};
    return table;
}

}  // namespace pepsmqc::simd

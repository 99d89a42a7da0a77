#include "pepsmqc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pepsmqc/errors.hpp"
#include "pepsmqc/simd/kernels.hpp"

namespace pepsmqc {

namespace pauli {
const std::array<CMatrix, 4>& sigma() {
    static const std::array<CMatrix, 4> table = [] {
        std::array<CMatrix, 4> s;
        s[0] = CMatrix::Identity(2, 2);
        s[1] = CMatrix::Zero(2, 2);
        s[1](0, 1) = 1.0;
        s[1](1, 0) = 1.0;
        s[2] = CMatrix::Zero(2, 2);
        s[2](0, 1) = -kI;
        s[2](1, 0) = kI;
        s[3] = CMatrix::Zero(2, 2);
        s[3](0, 0) = 1.0;
        s[3](1, 1) = -1.0;
        return s;
    }();
    return table;
}
}  // namespace pauli

CMatrix pauli_rotation(const CMatrix& p, double theta) {
    return std::cos(theta / 2.0) * CMatrix::Identity(p.rows(), p.cols()) +
           kI * std::sin(theta / 2.0) * p;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix kron_all(std::span<const CMatrix> factors) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (const auto& f : factors) {
        out = kron(out, f);
    }
    return out;
}

CMatrix embed_on_wires(const CMatrix& op, int first_wire, int wires) {
    const Eigen::Index span = op.rows();
    int op_wires = 0;
    while ((Eigen::Index{1} << op_wires) < span) {
        ++op_wires;
    }
    if (op.rows() != op.cols() || (Eigen::Index{1} << op_wires) != span || first_wire < 0 ||
        first_wire + op_wires > wires) {
        throw InputError("embed_on_wires: operator does not fit the wire range");
    }
    const CMatrix left = CMatrix::Identity(Eigen::Index{1} << first_wire, Eigen::Index{1} << first_wire);
    const int rest = wires - first_wire - op_wires;
    const CMatrix right = CMatrix::Identity(Eigen::Index{1} << rest, Eigen::Index{1} << rest);
    return kron(kron(left, op), right);
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

bool is_unitary(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).norm() <= tol;
}

CMatrix reshuffle(const CMatrix& m, int da, int db) {
    if (m.rows() != da * db || m.cols() != da * db) {
        throw InputError("reshuffle: expected a " + std::to_string(da * db) + "x" +
                         std::to_string(da * db) + " operator");
    }
    CMatrix out(da * da, db * db);
    for (int i = 0; i < da; ++i) {
        for (int j = 0; j < db; ++j) {
            for (int k = 0; k < da; ++k) {
                for (int l = 0; l < db; ++l) {
                    out(i * da + k, j * db + l) = m(i * db + j, k * db + l);
                }
            }
        }
    }
    return out;
}

int operator_schmidt_rank(const CMatrix& m, double tol, int da, int db) {
    const Eigen::JacobiSVD<CMatrix> svd(reshuffle(m, da, db));
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol * s(0)) {
            ++rank;
        }
    }
    return rank;
}

std::pair<CMatrix, CMatrix> factor_product(const CMatrix& m, int da, int db) {
    const Eigen::JacobiSVD<CMatrix> svd(reshuffle(m, da, db), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double root = std::sqrt(svd.singularValues()(0));
    CMatrix a(da, da);
    CMatrix b(db, db);
    for (int i = 0; i < da; ++i) {
        for (int k = 0; k < da; ++k) {
            a(i, k) = root * svd.matrixU()(i * da + k, 0);
        }
    }
    for (int j = 0; j < db; ++j) {
        for (int l = 0; l < db; ++l) {
            b(j, l) = root * std::conj(svd.matrixV()(j * db + l, 0));
        }
    }
    return {a, b};
}

HermitianEig hermitian_eig(const CMatrix& m) {
    if (!is_hermitian(m, 1e-10)) {
        throw InputError("hermitian_eig: matrix is not Hermitian");
    }
    const CMatrix sym = 0.5 * (m + m.adjoint());
    const Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double distance_up_to_scale_phase(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InputError("distance_up_to_scale_phase: shape mismatch");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 && nb == 0.0) {
        return 0.0;
    }
    if (na == 0.0 || nb == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const cplx overlap = (b.array().conjugate() * a.array()).sum();
    const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0};
    return (a / na - phase * b / nb).norm();
}

CMatrix random_su2(std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    double q[4];
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : q) {
            x = normal(rng);
            norm += x * x;
        }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    const cplx a{q[0] / norm, q[1] / norm};
    const cplx b{q[2] / norm, q[3] / norm};
    CMatrix u(2, 2);
    u << a, b, -std::conj(b), std::conj(a);
    return u;
}

cplx principal_sqrt(cplx z) { return std::sqrt(z); }

// ---------------------------------------------------------------------------

LinearOperator as_operator(const SparseMatrix& m) {
    if (m.rows() != m.cols()) {
        throw InputError("as_operator: matrix is not square");
    }
    if (!m.isCompressed()) {
        throw InputError("as_operator: matrix must be compressed");
    }
    const SparseMatrix* ptr = &m;
    LinearOperator op;
    op.dim = static_cast<std::size_t>(m.rows());
    op.apply = [ptr](std::span<const cplx> in, std::span<cplx> out) {
        simd::active().csr_matvec(static_cast<std::size_t>(ptr->rows()), ptr->outerIndexPtr(),
                                  ptr->innerIndexPtr(), ptr->valuePtr(), in.data(), out.data());
    };
    return op;
}

namespace {

std::span<cplx> column(CMatrix& m, Eigen::Index j) {
    return {m.data() + j * m.rows(), static_cast<std::size_t>(m.rows())};
}

// Orthonormalize column j of `basis` against columns [0, j) with two passes of
// classical Gram-Schmidt. Returns the norm left after projection.
double orthonormalize_column(CMatrix& basis, Eigen::Index j) {
    auto target = column(basis, j);
    const double initial = std::sqrt(simd::norm2(target));
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const cplx c = simd::dotc(column(basis, i), target);
            simd::axpy(-c, column(basis, i), target);
        }
    }
    const double rest = std::sqrt(simd::norm2(target));
    if (rest <= 1e-10 * std::max(initial, 1e-300)) {
        return 0.0;
    }
    for (auto& x : target) {
        x /= rest;
    }
    return rest;
}

void fill_random(CMatrix& m, Eigen::Index j, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    for (auto& x : column(m, j)) {
        x = {normal(rng), normal(rng)};
    }
}

}  // namespace

LowSpectrum sparse_low_spectrum(const LinearOperator& h, std::size_t k,
                                const SpectrumOptions& options) {
    const std::size_t n = h.dim;
    if (n == 0 || k == 0 || k > n) {
        throw InputError("sparse_low_spectrum: need 0 < k <= dim");
    }
    if (n > options.max_dim) {
        throw ResourceCapError("sparse_low_spectrum: dimension " + std::to_string(n) +
                               " exceeds cap " + std::to_string(options.max_dim));
    }
    const auto dim = static_cast<Eigen::Index>(n);
    const auto block = static_cast<Eigen::Index>(
        std::min<std::size_t>(n, options.block_size ? std::max(options.block_size, k) : k + 4));
    const auto max_basis =
        std::min<Eigen::Index>(dim, block * static_cast<Eigen::Index>(std::max<std::size_t>(options.krylov_blocks, 2)));

    std::mt19937_64 rng(options.seed);
    LowSpectrum result;

    CMatrix start(dim, block);
    for (Eigen::Index j = 0; j < block; ++j) {
        do {
            fill_random(start, j, rng);
        } while (orthonormalize_column(start, j) == 0.0);
    }

    CMatrix basis(dim, max_basis);
    CMatrix image(dim, max_basis);  // h applied to each basis column
    auto apply_column = [&](Eigen::Index j) {
        h.apply(column(basis, j), column(image, j));
        ++result.matvecs;
    };

    for (std::size_t restart = 0; restart < options.max_restarts; ++restart) {
        result.restarts = restart + 1;
        Eigen::Index filled = 0;
        for (Eigen::Index j = 0; j < block; ++j) {
            basis.col(filled) = start.col(j);
            if (orthonormalize_column(basis, filled) != 0.0) {
                apply_column(filled);
                ++filled;
            }
        }
        // Grow the Krylov space block by block from the images of the previous block.
        Eigen::Index previous_begin = 0;
        while (filled < max_basis) {
            const Eigen::Index previous_end = filled;
            for (Eigen::Index j = previous_begin; j < previous_end && filled < max_basis; ++j) {
                basis.col(filled) = image.col(j);
                if (orthonormalize_column(basis, filled) != 0.0) {
                    apply_column(filled);
                    ++filled;
                }
            }
            if (filled == previous_end) {
                // Invariant subspace reached; pad with random directions if room remains.
                bool grew = false;
                for (int attempt = 0; attempt < 4 && filled < max_basis; ++attempt) {
                    fill_random(basis, filled, rng);
                    if (orthonormalize_column(basis, filled) != 0.0) {
                        apply_column(filled);
                        ++filled;
                        grew = true;
                        break;
                    }
                }
                if (!grew) {
                    break;
                }
            }
            previous_begin = previous_end;
        }

        const auto q = basis.leftCols(filled);
        const auto hq = image.leftCols(filled);
        CMatrix projected = q.adjoint() * hq;
        projected = 0.5 * (projected + projected.adjoint()).eval();
        const Eigen::SelfAdjointEigenSolver<CMatrix> ritz(projected);
        const Eigen::Index keep = std::min<Eigen::Index>(block, filled);
        const CMatrix coeffs = ritz.eigenvectors().leftCols(keep);
        const CMatrix vectors = q * coeffs;
        const CMatrix images = hq * coeffs;

        std::vector<double> residuals(static_cast<std::size_t>(keep));
        bool converged = keep >= static_cast<Eigen::Index>(k);
        for (Eigen::Index j = 0; j < keep; ++j) {
            const double theta = ritz.eigenvalues()(j);
            residuals[static_cast<std::size_t>(j)] = (images.col(j) - theta * vectors.col(j)).norm();
            if (j < static_cast<Eigen::Index>(k) && residuals[static_cast<std::size_t>(j)] > options.tolerance) {
                converged = false;
            }
        }
        if (converged || filled == dim) {
            result.values.assign(ritz.eigenvalues().data(), ritz.eigenvalues().data() + k);
            result.vectors = vectors.leftCols(static_cast<Eigen::Index>(k));
            result.residuals.assign(residuals.begin(), residuals.begin() + static_cast<std::ptrdiff_t>(k));
            return result;
        }
        start = vectors;
        if (start.cols() < block) {
            const Eigen::Index have = start.cols();
            start.conservativeResize(dim, block);
            for (Eigen::Index j = have; j < block; ++j) {
                do {
                    fill_random(start, j, rng);
                } while (orthonormalize_column(start, j) == 0.0);
            }
        }
    }
    throw ConvergenceError("sparse_low_spectrum: no convergence after " +
                           std::to_string(options.max_restarts) + " restarts");
}

}  // namespace pepsmqc

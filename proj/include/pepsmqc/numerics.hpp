#pragma once

// Dense and sparse complex linear algebra shared by every module.
//
// Index convention: in every tensor product the leftmost factor is the most
// significant index (row-major kron).

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace pepsmqc {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor, int>;

inline constexpr cplx kI{0.0, 1.0};

struct Tolerances {
    double structural = 1e-10;
    double iterative = 1e-8;
};

namespace pauli {
/// Sigma = (I, X, Y, Z); index 0..3.
const std::array<CMatrix, 4>& sigma();
inline const CMatrix& I() { return sigma()[0]; }
inline const CMatrix& X() { return sigma()[1]; }
inline const CMatrix& Y() { return sigma()[2]; }
inline const CMatrix& Z() { return sigma()[3]; }
}  // namespace pauli

/// exp(i theta P / 2) for a Pauli-like P with P^2 = I.
CMatrix pauli_rotation(const CMatrix& p, double theta);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix kron_all(std::span<const CMatrix> factors);

/// I_{2^wire} (x) op (x) I_{...} acting on `wires` qubits, wire 0 most significant.
/// `op` may span several consecutive wires.
CMatrix embed_on_wires(const CMatrix& op, int first_wire, int wires);

bool is_hermitian(const CMatrix& m, double tol = 1e-10);
bool is_unitary(const CMatrix& m, double tol = 1e-10);

/// Realignment across a bipartition (da x da) (x) (db x db):
/// out((i,k),(j,l)) = m((i,j),(k,l)).
CMatrix reshuffle(const CMatrix& m, int da = 2, int db = 2);

int operator_schmidt_rank(const CMatrix& m, double tol = 1e-10, int da = 2, int db = 2);

/// Factor a Schmidt-rank-one operator as a (x) b from the leading singular
/// triple of the reshuffled matrix. Norms are split evenly.
std::pair<CMatrix, CMatrix> factor_product(const CMatrix& m, int da = 2, int db = 2);

struct HermitianEig {
    Eigen::VectorXd values;  // ascending
    CMatrix vectors;         // columns
};

/// Throws InputError unless m is Hermitian within 1e-10 (relative to max(1, |m|)).
HermitianEig hermitian_eig(const CMatrix& m);

/// min over theta of | a/|a| - e^{i theta} b/|b| |_F. Zero iff a and b agree up to a
/// positive scale and a global phase. Both zero gives 0; exactly one zero gives +inf.
double distance_up_to_scale_phase(const CMatrix& a, const CMatrix& b);

/// Haar-distributed element of SU(2).
CMatrix random_su2(std::mt19937_64& rng);

/// Complex square root of det(m), principal branch, used to move a unitary into SU(n).
cplx principal_sqrt(cplx z);

// ---------------------------------------------------------------------------
// Iterative lowest spectrum

struct LinearOperator {
    std::size_t dim = 0;
    std::function<void(std::span<const cplx>, std::span<cplx>)> apply;
};

/// Wraps a row-major CSR matrix; the matvec runs on the active SIMD kernel table.
LinearOperator as_operator(const SparseMatrix& m);

struct SpectrumOptions {
    std::size_t block_size = 0;     // 0: k + 4
    std::size_t krylov_blocks = 6;  // blocks per restart cycle
    std::size_t max_restarts = 300;
    double tolerance = 1e-8;  // per-pair residual |h v - lambda v|
    std::uint64_t seed = 0x5eedULL;
    std::size_t max_dim = std::size_t{1} << 20;
};

struct LowSpectrum {
    std::vector<double> values;  // ascending, k of them
    CMatrix vectors;             // dim x k
    std::vector<double> residuals;
    std::size_t restarts = 0;
    std::size_t matvecs = 0;
};

/// k lowest eigenpairs of a Hermitian operator by restarted block Krylov
/// iteration with full reorthogonalization. Degenerate clusters up to the
/// block size are resolved. Throws ConvergenceError at the restart cap and
/// ResourceCapError above max_dim.
LowSpectrum sparse_low_spectrum(const LinearOperator& h, std::size_t k,
                                const SpectrumOptions& options = {});

}  // namespace pepsmqc

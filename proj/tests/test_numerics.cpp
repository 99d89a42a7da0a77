#include <gtest/gtest.h>

#include <random>

#include "pepsmqc/errors.hpp"
#include "pepsmqc/numerics.hpp"

using namespace pepsmqc;

namespace {

CMatrix cz() {
    CMatrix m = CMatrix::Identity(4, 4);
    m(3, 3) = -1.0;
    return m;
}

CMatrix swap_gate() {
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return m;
}

CMatrix random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m(i, j) = {g(rng), g(rng)};
        }
    }
    return m;
}

}  // namespace

TEST(Kron, Examples) {
    EXPECT_TRUE(kron(pauli::I(), pauli::I()).isApprox(CMatrix::Identity(4, 4)));

    CMatrix xz = CMatrix::Zero(4, 4);
    xz(0, 2) = 1.0;
    xz(1, 3) = -1.0;
    xz(2, 0) = 1.0;
    xz(3, 1) = -1.0;
    EXPECT_EQ(kron(pauli::X(), pauli::Z()), xz);

    CMatrix zz = CMatrix::Zero(4, 4);
    zz.diagonal() << 1.0, -1.0, -1.0, 1.0;
    EXPECT_EQ(kron(pauli::Z(), pauli::Z()), zz);
}

TEST(Kron, EmbedOnWires) {
    const CMatrix op = embed_on_wires(pauli::X(), 1, 3);
    const CMatrix expected = kron(kron(pauli::I(), pauli::X()), pauli::I());
    EXPECT_EQ(op, expected);
    EXPECT_THROW(embed_on_wires(cz(), 2, 3), InputError);
}

TEST(SchmidtRank, Examples) {
    EXPECT_EQ(operator_schmidt_rank(kron(pauli::X(), pauli::Z())), 1);
    EXPECT_EQ(operator_schmidt_rank(cz()), 2);
    EXPECT_EQ(operator_schmidt_rank(swap_gate()), 4);
    EXPECT_THROW(operator_schmidt_rank(pauli::X()), InputError);
}

TEST(SchmidtRank, ProductsHaveRankOne) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const CMatrix a = random_matrix(rng, 2);
        const CMatrix b = random_matrix(rng, 2);
        const CMatrix p = kron(a, b);
        EXPECT_EQ(operator_schmidt_rank(p), 1);
        const auto [fa, fb] = factor_product(p);
        EXPECT_LE((kron(fa, fb) - p).norm(), 1e-10 * p.norm());
    }
}

TEST(HermitianEig, Examples) {
    auto z = hermitian_eig(pauli::Z());
    EXPECT_NEAR(z.values(0), -1.0, 1e-12);
    EXPECT_NEAR(z.values(1), 1.0, 1e-12);

    auto id = hermitian_eig(CMatrix::Identity(4, 4));
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(id.values(i), 1.0, 1e-12);
    }

    auto xx = hermitian_eig(kron(pauli::X(), pauli::X()));
    const double expected[4] = {-1, -1, 1, 1};
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(xx.values(i), expected[i], 1e-12);
    }
    EXPECT_THROW(hermitian_eig(CMatrix(pauli::X() * pauli::Z())), InputError);
}

TEST(HermitianEig, Reconstructs) {
    std::mt19937_64 rng(11);
    for (int n : {2, 5, 16}) {
        const CMatrix a = random_matrix(rng, n);
        const CMatrix h = a + a.adjoint();
        const auto e = hermitian_eig(h);
        const CMatrix back = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
        EXPECT_LE((back - h).norm(), 1e-9 * h.norm());
        EXPECT_LE((e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).norm(), 1e-10);
    }
}

TEST(ScalePhaseDistance, Basics) {
    const CMatrix u = pauli_rotation(pauli::Y(), 0.3);
    EXPECT_LT(distance_up_to_scale_phase(u, 3.0 * std::polar(1.0, 1.1) * u), 1e-14);
    EXPECT_GT(distance_up_to_scale_phase(u, pauli::X()), 0.1);
    EXPECT_EQ(distance_up_to_scale_phase(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)), 0.0);
    EXPECT_TRUE(std::isinf(distance_up_to_scale_phase(u, CMatrix::Zero(2, 2))));
}

TEST(RandomSu2, IsSpecialUnitary) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const CMatrix u = random_su2(rng);
        EXPECT_TRUE(is_unitary(u, 1e-12));
        EXPECT_NEAR(std::abs(u.determinant() - 1.0), 0.0, 1e-12);
    }
}

namespace {

SparseMatrix to_sparse(const CMatrix& m) {
    SparseMatrix s = m.sparseView();
    s.makeCompressed();
    return s;
}

std::vector<double> low(const CMatrix& m, std::size_t k) {
    const SparseMatrix s = to_sparse(m);
    return sparse_low_spectrum(as_operator(s), k).values;
}

}  // namespace

TEST(SparseLowSpectrum, Examples) {
    CMatrix d = CMatrix::Zero(4, 4);
    d.diagonal() << 0.0, 1.0, 2.0, 3.0;
    const auto v = low(d, 2);
    EXPECT_NEAR(v[0], 0.0, 1e-8);
    EXPECT_NEAR(v[1], 1.0, 1e-8);

    EXPECT_NEAR(low(kron(pauli::Z(), pauli::Z()), 1)[0], -1.0, 1e-8);

    // Complement of a random rank-40 projector on 64 dimensions.
    std::mt19937_64 rng(5);
    const CMatrix a = random_matrix(rng, 64);
    const Eigen::HouseholderQR<CMatrix> qr(a);
    const CMatrix q = CMatrix(qr.householderQ()).leftCols(40);
    const CMatrix h = CMatrix::Identity(64, 64) - q * q.adjoint();
    EXPECT_NEAR(low(h, 1)[0], 0.0, 1e-8);
}

TEST(SparseLowSpectrum, AgreesWithDense) {
    std::mt19937_64 rng(9);
    for (int n : {8, 40, 256}) {
        CMatrix a = random_matrix(rng, n);
        // Sparsify so the CSR path is exercised with irregular rows.
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if ((i * 7 + j * 3) % 5 != 0) {
                    a(i, j) = 0.0;
                }
            }
        }
        const CMatrix h = a + a.adjoint();
        const auto dense = hermitian_eig(h);
        const SparseMatrix s = to_sparse(h);
        const std::size_t k = std::min<std::size_t>(6, static_cast<std::size_t>(n));
        const auto spec = sparse_low_spectrum(as_operator(s), k);
        for (std::size_t i = 0; i < k; ++i) {
            EXPECT_NEAR(spec.values[i], dense.values(static_cast<Eigen::Index>(i)), 1e-8) << "n=" << n;
            EXPECT_LE(spec.residuals[i], 1e-8);
        }
    }
}

TEST(SparseLowSpectrum, DegenerateCluster) {
    CMatrix d = CMatrix::Zero(50, 50);
    for (int i = 0; i < 50; ++i) {
        d(i, i) = i < 6 ? 0.0 : 1.0 + i;
    }
    SpectrumOptions opts;
    opts.block_size = 10;
    const SparseMatrix s = to_sparse(d);
    const auto spec = sparse_low_spectrum(as_operator(s), 7, opts);
    for (int i = 0; i < 6; ++i) {
        EXPECT_NEAR(spec.values[static_cast<std::size_t>(i)], 0.0, 1e-8);
    }
    EXPECT_NEAR(spec.values[6], 7.0, 1e-8);
}

TEST(SparseLowSpectrum, Errors) {
    CMatrix d = CMatrix::Identity(4, 4);
    const SparseMatrix s = to_sparse(d);
    EXPECT_THROW(sparse_low_spectrum(as_operator(s), 5), InputError);
    SpectrumOptions opts;
    opts.max_dim = 2;
    EXPECT_THROW(sparse_low_spectrum(as_operator(s), 1, opts), ResourceCapError);

    // A tolerance no iteration can meet hits the restart cap.
    std::mt19937_64 rng(1);
    const CMatrix a = random_matrix(rng, 200);
    const SparseMatrix h = to_sparse(a + a.adjoint());
    SpectrumOptions strict;
    strict.tolerance = 0.0;
    strict.max_restarts = 2;
    EXPECT_THROW(sparse_low_spectrum(as_operator(h), 1, strict), ConvergenceError);
}

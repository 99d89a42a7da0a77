#include <gtest/gtest.h>

#include <random>

#include "pepsmqc/correlation.hpp"
#include "pepsmqc/errors.hpp"
#include "pepsmqc/honeycomb.hpp"

using namespace pepsmqc;

namespace {

CVector ket(std::initializer_list<cplx> v) {
    CVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (cplx x : v) {
        out(i++) = x;
    }
    return out;
}

MatrixList pauli_list() {
    return MatrixList({pauli::I(), pauli::X(), pauli::Y(), pauli::Z()});
}

CMatrix cz() { return honeycomb::cz(); }

}  // namespace

TEST(MpsAmplitude, Examples) {
    const BoundaryPair b(ket({1, 0}), ket({1, 0}));
    const MatrixList sigma = pauli_list();
    const int level3[] = {3};
    EXPECT_NEAR(std::abs(mps_amplitude(std::span(&sigma, 1), b, level3) - 1.0), 0.0, 1e-15);

    const std::vector<MatrixList> two = {honeycomb::square_list(), honeycomb::square_list()};
    const int zeros[] = {0, 0};
    EXPECT_NEAR(std::abs(mps_amplitude(two, b, zeros) - 0.5), 0.0, 1e-15);

    const MatrixList with_zero({pauli::I(), CMatrix::Zero(2, 2)});
    const int one[] = {1};
    EXPECT_EQ(mps_amplitude(std::span(&with_zero, 1), b, one), cplx(0.0));

    const int bad[] = {4};
    EXPECT_THROW(mps_amplitude(std::span(&sigma, 1), b, bad), InputError);
}

TEST(MpsAmplitude, RightToLeftOrder) {
    // <0| X Z |0> with Z applied first: site 1 = Z, site 2 = X -> <0|X Z|0> = 0,
    // and <1| X Z |0> = 1.
    const std::vector<MatrixList> lists = {MatrixList({pauli::Z()}), MatrixList({pauli::X()})};
    const int levels[] = {0, 0};
    EXPECT_EQ(mps_amplitude(lists, BoundaryPair(ket({0, 1}), ket({1, 0})), levels), cplx(1.0));
}

TEST(ProjectSite, Examples) {
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_LE((project_site(honeycomb::square_list(), ket({1, 0, 0, 0})) - r * pauli::I()).norm(), 1e-15);
    EXPECT_EQ(project_site(pauli_list(), ket({1, 0, 0, 0})), pauli::I());
    const auto table = honeycomb::single_qubit_basis(pauli::I());
    EXPECT_LE((project_site(honeycomb::square_list(), table[0]) - r * pauli::I()).norm(), 1e-15);
    EXPECT_THROW(project_site(pauli_list(), ket({1, 0})), InputError);
}

TEST(ProjectSite, Antilinear) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    auto rv = [&] { return ket({{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}}); };
    for (int i = 0; i < 20; ++i) {
        const CVector phi = rv();
        const CVector chi = rv();
        const cplx a{g(rng), g(rng)};
        const cplx b{g(rng), g(rng)};
        const auto& list = honeycomb::square_list();
        const CMatrix lhs = project_site(list, a * phi + b * chi);
        const CMatrix rhs = std::conj(a) * project_site(list, phi) + std::conj(b) * project_site(list, chi);
        EXPECT_LE((lhs - rhs).norm(), 1e-14 * std::max(1.0, lhs.norm()));
    }
}

TEST(ProjectSite, OrthonormalBasesGiveOrthogonalByproducts) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto basis = honeycomb::single_qubit_basis(random_su2(rng));
        cplx c0 = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                const CMatrix ai = project_site(honeycomb::square_list(), basis[i]);
                const CMatrix aj = project_site(honeycomb::square_list(), basis[j]);
                const cplx ip = (ai.adjoint() * aj).trace();
                if (i == j) {
                    if (i == 0) {
                        c0 = ip;
                    }
                    EXPECT_NEAR(std::abs(ip - c0), 0.0, 1e-12);
                    EXPECT_GT(ip.real(), 0.0);
                } else {
                    EXPECT_NEAR(std::abs(ip), 0.0, 1e-12);
                }
            }
        }
    }
}

TEST(GateProduct, Examples) {
    const CMatrix ops[] = {pauli::Z(), pauli::X()};  // Z measured first
    const CMatrix xz = gate_product(ops);
    EXPECT_EQ(xz, CMatrix(pauli::X() * pauli::Z()));
    EXPECT_LT(distance_up_to_scale_phase(xz, pauli::Y()), 1e-14);  // XZ = -iY
    const CMatrix one[] = {pauli::I()};
    EXPECT_EQ(gate_product(one), pauli::I());
    EXPECT_EQ(gate_product({}), CMatrix(CMatrix::Identity(2, 2)));
    const CMatrix bad[] = {pauli::I(), CMatrix::Identity(4, 4)};
    EXPECT_THROW(gate_product(bad), InputError);
}

TEST(ByproductOf, Examples) {
    std::mt19937_64 rng(12);
    const CMatrix u = random_su2(rng);
    EXPECT_LE((byproduct_of(pauli::X() * u, u) - pauli::X()).norm(), 1e-12);
    EXPECT_LE((byproduct_of(u, u) - pauli::I()).norm(), 1e-12);
    const CMatrix zx = pauli::Z() * pauli::X();
    EXPECT_LE((byproduct_of(zx * u, u) - zx).norm(), 1e-12);
    CMatrix singular = CMatrix::Zero(2, 2);
    singular(0, 0) = 1.0;
    EXPECT_THROW(byproduct_of(u, singular), InputError);
}

TEST(ReadoutApply, Examples) {
    const auto& map = honeycomb::readout_map();
    const double r = 1.0 / std::sqrt(2.0);
    const CVector zero = readout_apply(map, pauli::I(), ket({1, 0}));
    EXPECT_LE((zero - ket({r, 0, 0, r})).norm(), 1e-15);
    const CVector one = readout_apply(map, pauli::I(), ket({0, 1}));
    EXPECT_LE((one - ket({0, r, cplx(0, r), 0})).norm(), 1e-15);
    EXPECT_THROW(readout_apply(map, pauli::I(), ket({0, 0})), InputError);
    EXPECT_THROW(readout_apply(map, 2.0 * pauli::I(), ket({1, 0})), InputError);
}

TEST(ReadoutApply, PreservesInnerProducts) {
    std::mt19937_64 rng(6);
    const auto& r = honeycomb::readout_map().matrix();
    for (int i = 0; i < 20; ++i) {
        const CVector a = random_su2(rng).col(0);
        const CVector b = random_su2(rng).col(0);
        const cplx phys = (r * a).dot(r * b);
        EXPECT_NEAR(std::abs(phys), std::abs(a.dot(b)), 1e-14);
    }
}

TEST(ReadoutMapType, Validates) {
    CMatrix bad(4, 2);
    bad << 1, 0, 1, 0, 0, 0, 0, 0;
    EXPECT_THROW(ReadoutMap(bad, 1.0), InputError);
    EXPECT_THROW(ReadoutMap(honeycomb::readout_map().matrix(), 0.0), InputError);
}

TEST(MeasurementBasisType, Validates) {
    EXPECT_THROW(MeasurementBasis({ket({1, 0}), ket({1, 0})}), InputError);
    EXPECT_NO_THROW(MeasurementBasis({ket({1, 0}), ket({0, 1})}));
    // Basis vectors for which A[phi] is singular are rejected when paired with the list.
    const MeasurementBasis removal = honeycomb::edge_removal_measurement();
    EXPECT_THROW(removal.check_invertible_on(honeycomb::square_list()), InputError);
    EXPECT_NO_THROW(honeycomb::single_qubit_basis(pauli::I()).check_invertible_on(honeycomb::square_list()));
}

TEST(VerticalContract, ModelCzAndZero) {
    const CMatrix w = honeycomb::cz_block(0, 0, 0);
    EXPECT_LT(distance_up_to_scale_phase(w, cz()), 1e-12);

    // (d,m,u) = (1,0,0): X on the lower wire on the left of CZ (E_l(1) = X).
    const CMatrix expected = kron(pauli::I(), pauli::X()) * cz();
    EXPECT_LT(distance_up_to_scale_phase(honeycomb::cz_block(1, 0, 0), expected), 1e-12);

    const SiteTensor zero({{CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)}});
    const CMatrix z = vertical_contract(zero, zero, ket({1}), ket({1}), pauli::I());
    EXPECT_EQ(z.norm(), 0.0);
}

TEST(LocalityCondition, Examples) {
    auto xi = locality_condition(cz(), pauli::X(), pauli::I());
    ASSERT_TRUE(xi.has_value());
    EXPECT_LT(distance_up_to_scale_phase(xi->g, pauli::X()), 1e-10);
    EXPECT_LT(distance_up_to_scale_phase(xi->h, pauli::Z()), 1e-10);
    EXPECT_NEAR(std::abs(xi->h.determinant() - 1.0), 0.0, 1e-10);

    const CMatrix zt = pauli_rotation(pauli::Z(), 0.7);
    auto zr = locality_condition(cz(), zt, pauli::I());
    ASSERT_TRUE(zr.has_value());
    EXPECT_LT(distance_up_to_scale_phase(zr->g, zt), 1e-10);
    EXPECT_LT(distance_up_to_scale_phase(zr->h, pauli::I()), 1e-10);

    // Under a partial ZZ rotation a Y by-product becomes entangled.
    CMatrix w = CMatrix::Zero(4, 4);
    const cplx ph = std::polar(1.0, M_PI / 6.0);
    w.diagonal() << ph, std::conj(ph), std::conj(ph), ph;
    EXPECT_FALSE(locality_condition(w, pauli::Y(), pauli::I()).has_value());
    EXPECT_THROW(locality_condition(2.0 * cz(), pauli::X(), pauli::I()), InputError);
}

TEST(LocalityCondition, ResidualAndCoefficientForm) {
    std::mt19937_64 rng(21);
    const MatrixList basis = honeycomb::circle_horizontal();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const CMatrix e = pauli_rotation(pauli::Z(), 0.4 * i) * pauli::sigma()[static_cast<std::size_t>(j)];
            const CMatrix f = pauli::sigma()[static_cast<std::size_t>((i + j) % 4)];
            auto gh = locality_condition(cz(), e, f);
            ASSERT_TRUE(gh.has_value());
            EXPECT_LE((cz() * kron(e, f) - kron(gh->g, gh->h) * cz()).norm(), 1e-9);

            // Coefficient form: with W = sum C(l,k) B_k (x) B_l the product (G (x) H) W
            // has coefficients h^t C g where G B_mu = sum g(mu,nu) B_nu.
            auto coeff_matrix = [&](const CMatrix& op4) {
                CMatrix c(4, 4);  // c(l, k)
                for (int k = 0; k < 4; ++k) {
                    for (int l = 0; l < 4; ++l) {
                        const CMatrix b = kron(basis[static_cast<std::size_t>(k)], basis[static_cast<std::size_t>(l)]);
                        c(l, k) = (b.adjoint() * op4).trace() / (b.adjoint() * b).trace();
                    }
                }
                return c;
            };
            auto transfer = [&](const CMatrix& op) {
                CMatrix t(4, 4);
                for (int mu = 0; mu < 4; ++mu) {
                    t.row(mu) = hs_coefficients(basis, op * basis[static_cast<std::size_t>(mu)]).transpose();
                }
                return t;
            };
            const CMatrix c = coeff_matrix(cz());
            const CMatrix lhs = coeff_matrix(kron(gh->g, gh->h) * cz());
            const CMatrix rhs = transfer(gh->h).transpose() * c * transfer(gh->g);
            EXPECT_LE((lhs - rhs).norm(), 1e-9);
        }
    }
}

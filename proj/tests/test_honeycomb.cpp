#include <gtest/gtest.h>

#include <json.hpp>
#include <random>

#include "pepsmqc/errors.hpp"
#include "pepsmqc/honeycomb.hpp"

using namespace pepsmqc;
namespace hc = pepsmqc::honeycomb;

namespace {

CMatrix sigma(int k) { return pauli::sigma()[static_cast<std::size_t>(k)]; }

CMatrix hadamard() {
    CMatrix h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

}  // namespace

TEST(ModelConstants, Lists) {
    EXPECT_TRUE(hc::square_list().is_orthonormal(1e-15));
    for (const auto& b : hc::circle_horizontal().entries()) {
        EXPECT_TRUE(is_unitary(b, 1e-15));
    }
    EXPECT_EQ(hc::e_left()[1], pauli::X());
    EXPECT_EQ(hc::e_left()[3], pauli::I());
    EXPECT_EQ(hc::e_right()[1], pauli::I());
    EXPECT_EQ(hc::e_right()[2], pauli::X());
    for (int k = 0; k < 4; ++k) {
        EXPECT_LE((hc::circle_pauli(k).matrix() - hc::circle_horizontal()[static_cast<std::size_t>(k)]).norm(),
                  1e-15);
        const CMatrix flipped = pauli::X() * hc::circle_horizontal()[static_cast<std::size_t>(k)] * pauli::X();
        EXPECT_LE((hc::circle_pauli(k, true).matrix() - flipped).norm(), 1e-15);
    }
}

TEST(SingleQubitBasis, IdentityExamples) {
    const auto basis = hc::single_qubit_basis(pauli::I());
    CVector e0 = CVector::Zero(4);
    e0(0) = 1.0;
    EXPECT_LE((basis[0] - e0).norm(), 1e-15);
    CVector e3 = CVector::Zero(4);
    e3(3) = 1.0;
    EXPECT_LE((basis[3] - e3).norm(), 1e-15);
    EXPECT_LT(distance_up_to_scale_phase(project_site(hc::square_list(), basis[3]), pauli::Z()), 1e-15);
}

TEST(SingleQubitBasis, HadamardViaSu2Representative) {
    const auto rep = hc::su2_representative(hadamard());
    EXPECT_NEAR(std::abs(rep.v.determinant() - 1.0), 0.0, 1e-14);
    EXPECT_LE((rep.factor * rep.v - hadamard()).norm(), 1e-14);
    const auto basis = hc::single_qubit_basis(rep.v);
    EXPECT_LT(distance_up_to_scale_phase(project_site(hc::square_list(), basis[0]), hadamard()), 1e-14);
    EXPECT_THROW(hc::single_qubit_basis(hadamard()), InputError);
    EXPECT_THROW(hc::single_qubit_basis(2.0 * pauli::I()), InputError);
}

TEST(SingleQubitBasis, HaarRandomRealizesSigmaTimesU) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const CMatrix u = random_su2(rng);
        const auto basis = hc::single_qubit_basis(u);
        EXPECT_LE((basis.gram() - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
        for (int k = 0; k < 4; ++k) {
            const CMatrix realized = project_site(hc::square_list(), basis[static_cast<std::size_t>(k)]);
            // Exact form, including the scale: Sigma(k) U / sqrt 2.
            EXPECT_LE((realized - sigma(k) * u / std::sqrt(2.0)).norm(), 1e-12);
        }
    }
}

TEST(CzBlock, CTableAndIdealOutcome) {
    const int signs[4][4] = {{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, -1, -1}, {1, 1, -1, -1}};
    for (int s = 0; s < 4; ++s) {
        for (int t = 0; t < 4; ++t) {
            EXPECT_EQ(hc::c_coefficient(s, t, 0), cplx(signs[s][t])) << s << "," << t;
        }
    }
    EXPECT_EQ(hc::c_coefficient(2, 3, 0), cplx(-1.0));
    const CMatrix w = hc::cz_block_formula(0, 0, 0);
    const CMatrix pauli_expansion =
        0.5 * (kron(pauli::I(), pauli::I()) + kron(pauli::I(), pauli::Z()) + kron(pauli::Z(), pauli::I()) -
               kron(pauli::Z(), pauli::Z()));
    EXPECT_LE((pauli_expansion - hc::cz()).norm(), 1e-15);
    EXPECT_LT(distance_up_to_scale_phase(w, hc::cz()), 1e-14);
    EXPECT_LT(distance_up_to_scale_phase(hc::cz_block(0, 0, 0), hc::cz()), 1e-14);
}

TEST(CzBlock, AllOutcomesMatchClosedFormAndReference) {
    for (int d = 0; d < 4; ++d) {
        for (int m = 0; m < 4; ++m) {
            for (int u = 0; u < 4; ++u) {
                const CMatrix w = hc::cz_block(d, m, u);
                EXPECT_LT(distance_up_to_scale_phase(w, hc::cz_block_formula(d, m, u)), 1e-12);
                EXPECT_LT(distance_up_to_scale_phase(w, hc::cz_block_reference(d, m, u)), 1e-10)
                    << d << m << u;
                const auto bp = hc::cz_byproduct(d, m, u);
                const CMatrix rebuilt =
                    bp.scale * bp.phase * kron(pauli_matrix(bp.top), pauli_matrix(bp.bottom)) * hc::cz();
                EXPECT_LE((rebuilt - w).norm(), 1e-12);
            }
        }
    }
    EXPECT_THROW(hc::cz_block(4, 0, 0), InputError);
}

TEST(CzBlock, MidOutcomesRealizeSigmaTimesH) {
    const int expected_sigma[4] = {0, 1, 3, 2};
    for (int m = 0; m < 4; ++m) {
        EXPECT_EQ(hc::mid_outcome_sigma(m), expected_sigma[m]);
        const CMatrix realized = project_site(hc::square_list(), hc::entangler_mid_basis()[static_cast<std::size_t>(m)]);
        EXPECT_LT(distance_up_to_scale_phase(realized, sigma(expected_sigma[m]) * hadamard()), 1e-14);
    }
}

TEST(CzBlock, ByproductExamples) {
    auto bp = hc::cz_byproduct(0, 0, 0);
    EXPECT_EQ(bp.top, Pauli::I);
    EXPECT_EQ(bp.bottom, Pauli::I);
    // (d,m,u) = (1,0,0): X on the lower wire in front of CZ; no Z partner is needed
    // because E_r(1) = I.
    bp = hc::cz_byproduct(1, 0, 0);
    EXPECT_EQ(bp.top, Pauli::I);
    EXPECT_EQ(bp.bottom, Pauli::X);
    // (d,m,u) = (0,1,0): X on the upper wire on both sides of CZ -> (X Z partner).
    bp = hc::cz_byproduct(0, 1, 0);
    EXPECT_EQ(bp.top, Pauli::I);
    EXPECT_EQ(bp.bottom, Pauli::Z);
}

TEST(EdgeRemoval, BasisAndOperators) {
    const auto& basis = hc::edge_removal_measurement();
    EXPECT_LE((basis.gram() - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
    CVector plus(2);
    plus << 1.0, 1.0;
    plus /= std::sqrt(2.0);
    CVector minus(2);
    minus << 1.0, -1.0;
    minus /= std::sqrt(2.0);
    const CVector* beta[4] = {&plus, &plus, &minus, &minus};
    const CVector* alpha[4] = {&plus, &minus, &plus, &minus};
    for (int r = 0; r < 4; ++r) {
        const auto e = hc::edge_removal_basis(r);
        const CMatrix expected = *beta[r] * alpha[r]->adjoint();
        EXPECT_LE((e.op - expected).cwiseAbs().maxCoeff(), 1e-15) << r;
    }
    EXPECT_THROW(hc::edge_removal_basis(4), InputError);
}

TEST(EdgeRemoval, ConjugationRule) {
    const auto x = pauli::X();
    const auto flipped = hc::circle_horizontal().sandwiched(x, x);
    auto same = [](const MatrixList& a, const MatrixList& b) {
        for (std::size_t i = 0; i < a.arity(); ++i) {
            if ((a[i] - b[i]).norm() > 1e-15) {
                return false;
            }
        }
        return true;
    };
    auto r0 = hc::edge_removal_byproduct(0);
    EXPECT_TRUE(same(r0.upper, hc::circle_horizontal()));
    EXPECT_TRUE(same(r0.lower, hc::circle_horizontal()));
    auto r2 = hc::edge_removal_byproduct(2);
    EXPECT_TRUE(same(r2.upper, hc::circle_horizontal()));
    EXPECT_TRUE(same(r2.lower, flipped));
    auto r3 = hc::edge_removal_byproduct(3);
    EXPECT_TRUE(same(r3.upper, flipped));
    EXPECT_TRUE(same(r3.lower, flipped));

    // The realized two-wire operator factorizes into the rule's lists.
    for (int r = 0; r < 4; ++r) {
        const auto e = hc::edge_removal_basis(r);
        const auto rule = hc::edge_removal_byproduct(r);
        for (int ku = 0; ku < 4; ++ku) {
            for (int kd = 0; kd < 4; ++kd) {
                CVector su = CVector::Zero(4);
                su(ku) = 1.0;
                CVector sd = CVector::Zero(4);
                sd(kd) = 1.0;
                const CMatrix got = vertical_contract(hc::circle_tensor(), hc::circle_tensor(), su, sd, e.op);
                const CMatrix want = kron(rule.upper[static_cast<std::size_t>(ku)], rule.lower[static_cast<std::size_t>(kd)]) / 2.0;
                EXPECT_LE((got - want).norm(), 1e-15);
            }
        }
    }
}

TEST(Readout, MapAndProjectors) {
    const auto& map = hc::readout_map();
    const CMatrix rr = map.matrix().adjoint() * map.matrix();
    EXPECT_LE((rr - CMatrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_EQ(hc::readout_bit(0), 0);
    EXPECT_EQ(hc::readout_bit(2), 1);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const CVector phi = random_su2(rng).col(0);
        const CVector psi = map.matrix() * phi;
        const double p0 = (hc::readout_projector(0) * psi).squaredNorm();
        const double p1 = (hc::readout_projector(1) * psi).squaredNorm();
        EXPECT_NEAR(p0, std::norm(phi(0)), 1e-15);
        EXPECT_NEAR(p1, std::norm(phi(1)), 1e-15);
    }
}

TEST(DumpConstants, IsValidJson) {
    const auto j = nlohmann::json::parse(hc::dump_constants());
    EXPECT_EQ(j["schema"], "peps-mqc/1");
    EXPECT_EQ(j["square_list"].size(), 4U);
    EXPECT_EQ(j["c_table_m0"][2][3], -1.0);
}

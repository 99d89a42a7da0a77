#include <gtest/gtest.h>

#include <random>

#include "pepsmqc/errors.hpp"
#include "pepsmqc/honeycomb.hpp"
#include "pepsmqc/oracle.hpp"

using namespace pepsmqc;
namespace hc = pepsmqc::honeycomb;

namespace {

CVector ket(std::initializer_list<cplx> v) {
    CVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (cplx x : v) {
        out(i++) = x;
    }
    return out;
}

CVector random_ket(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> g;
    CVector v(dim);
    for (int i = 0; i < dim; ++i) {
        v(i) = cplx(g(rng), g(rng));
    }
    return v.normalized();
}

Gate su2(int wire, const CMatrix& m) {
    Gate g;
    g.kind = GateKind::su2;
    g.wire = wire;
    g.matrix = m;
    return g;
}

Gate cz(int a, int b) {
    Gate g;
    g.kind = GateKind::cz;
    g.wire = a;
    g.other = b;
    return g;
}

CMatrix hadamard() {
    CMatrix h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

CMatrix z_rotation(double theta) {
    CMatrix z = CMatrix::Zero(2, 2);
    z(0, 0) = std::exp(cplx(0.0, -theta / 2));
    z(1, 1) = std::exp(cplx(0.0, theta / 2));
    return z;
}

CircuitIR circuit(int wires, std::vector<Gate> gates, std::vector<InputState> inputs = {}) {
    CircuitIR c;
    c.wires = wires;
    c.gates = std::move(gates);
    c.inputs = std::move(inputs);
    return c;
}

}  // namespace

TEST(BuildPatch, SingleSquare) {
    const auto s = oracle::build_patch(oracle::row_layout(1, ket({1, 0}), ket({1, 0})));
    const CVector expected = ket({1, 0, 0, 1}) / std::sqrt(2.0);
    EXPECT_LE((s.amplitudes - expected).norm(), 1e-15);
}

TEST(BuildPatch, AmplitudesMatchCorrelationContraction) {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 4; ++n) {
        const CVector left = random_ket(rng, 2);
        const CVector right = random_ket(rng, 2);
        const auto s = oracle::build_patch(oracle::row_layout(n, left, right));
        const std::vector<MatrixList> lists(static_cast<std::size_t>(n), hc::square_list());
        const BoundaryPair boundary(left, right);
        CVector direct(s.amplitudes.size());
        for (Eigen::Index k = 0; k < direct.size(); ++k) {
            std::vector<int> levels(static_cast<std::size_t>(n));
            for (int pos = 0; pos < n; ++pos) {
                levels[static_cast<std::size_t>(pos)] = static_cast<int>((k >> (2 * (n - 1 - pos))) & 3);
            }
            direct(k) = mps_amplitude(lists, boundary, levels);
        }
        EXPECT_LE((s.amplitudes - direct / direct.norm()).norm(), 1e-12) << n;
    }
}

TEST(BuildPatch, Errors) {
    oracle::PatchLayout empty;
    empty.left = ket({1, 0});
    EXPECT_THROW(oracle::build_patch(empty), InputError);
    EXPECT_THROW(oracle::build_patch(oracle::row_layout(11, ket({1, 0}), ket({1, 0}))), ResourceCapError);
    EXPECT_THROW(oracle::build_patch(oracle::row_layout(2, ket({0, 0}), ket({1, 0}))), InputError);
}

TEST(MeasureSite, CompletenessAndSelfBasis) {
    std::mt19937_64 rng(11);
    const auto s = oracle::build_patch(oracle::row_layout(3, random_ket(rng, 2), random_ket(rng, 2)));
    const auto basis = hc::single_qubit_basis(random_su2(rng));
    for (int site = 0; site < 3; ++site) {
        double total = 0.0;
        for (int k = 0; k < 4; ++k) {
            total += oracle::measure_site(s, site, basis[static_cast<std::size_t>(k)]).probability;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
    const auto single = oracle::build_patch(oracle::row_layout(1, ket({1, 0}), ket({1, 0})));
    const auto m = oracle::measure_site(single, 0, single.amplitudes);
    EXPECT_NEAR(m.probability, 1.0, 1e-15);
    ASSERT_TRUE(m.post);
    EXPECT_EQ(m.post->size(), 0U);
    const auto zero = oracle::measure_site(single, 0, ket({0, 1, 0, 0}));
    EXPECT_NEAR(zero.probability, 0.0, 1e-15);
    EXPECT_FALSE(zero.post);
    EXPECT_THROW(oracle::measure_site(single, 3, single.amplitudes), InputError);
}

TEST(MeasureSite, BranchProbabilitiesMatchCorrelationPrediction) {
    // One wire [U]: the square outcome k leaves the readout state A[k]|0>.
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix u = random_su2(rng);
        const auto p = compile(circuit(1, {su2(0, u)}));
        const oracle::PatternBackend backend(p);
        const auto basis = basis_for(p.steps[0], 0, PauliFrame(1));
        // The readout square keeps the full correlation norm, so Born weights
        // are the normalized squared norms of A[k]|0>.
        std::array<CVector, 4> phi;
        double total = 0.0;
        for (int k = 0; k < 4; ++k) {
            phi[static_cast<std::size_t>(k)] =
                project_site(hc::square_list(), basis[static_cast<std::size_t>(k)]) * ket({1, 0});
            total += phi[static_cast<std::size_t>(k)].squaredNorm();
        }
        for (int k = 0; k < 4; ++k) {
            const auto [prob, node] = backend.measure(*backend.root(), 0, basis[static_cast<std::size_t>(k)]);
            const CVector& v = phi[static_cast<std::size_t>(k)];
            EXPECT_NEAR(prob, v.squaredNorm() / total, 1e-12);
            ASSERT_TRUE(node);
            const auto dist = backend.readout_distribution(*node);
            EXPECT_NEAR(dist[0], std::norm(v(0)) / v.squaredNorm(), 1e-12);
        }
    }
}

TEST(CrossValidate, CircuitSuite) {
    const std::vector<CircuitIR> suite = {
        circuit(1, {su2(0, pauli::I())}),
        circuit(1, {su2(0, hadamard())}),
        circuit(1, {su2(0, z_rotation(M_PI / 4))}, {InputState::plus}),
        circuit(1, {su2(0, z_rotation(M_PI / 3))}, {InputState::plus}),
        circuit(1, {su2(0, hadamard()), su2(0, hadamard())}),
        circuit(2, {cz(0, 1)}, {InputState::plus, InputState::plus}),
        circuit(2, {su2(0, hadamard()), cz(0, 1)}),
    };
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const auto r = oracle::cross_validate(suite[i]);
        EXPECT_TRUE(r.passed) << "circuit " << i << ": map " << r.max_map_residual << " readout "
                              << r.max_readout_error << " marginal " << r.marginal_error << " prob "
                              << r.probability_error;
        EXPECT_GT(r.supported_branches, 0U);
    }
}

TEST(CrossValidate, HadamardGivesUniformReadoutEverywhere) {
    const auto r = oracle::cross_validate(circuit(1, {su2(0, hadamard())}));
    for (const auto& b : r.simulation.branches) {
        EXPECT_NEAR(b.readout[0], 0.5, 1e-12);
        EXPECT_NEAR(b.readout[1], 0.5, 1e-12);
    }
}

TEST(CrossValidate, IdleCirclesAndEdgeRemoval) {
    // Three wires: column 0 removes edge (0,1) and leaves wire 2's circle idle.
    std::mt19937_64 rng(17);
    const auto r = oracle::cross_validate(circuit(3, {su2(2, random_su2(rng))}));
    EXPECT_TRUE(r.passed) << r.max_map_residual << " " << r.max_readout_error;
    const auto two = oracle::cross_validate(circuit(2, {su2(0, random_su2(rng)), su2(1, random_su2(rng))}));
    EXPECT_TRUE(two.passed) << two.max_map_residual << " " << two.max_readout_error;
}

TEST(CrossValidate, CapExceeded) {
    oracle::CrossValidationOptions opt;
    opt.max_sites = 5;
    EXPECT_THROW(oracle::cross_validate(circuit(2, {cz(0, 1)}), opt), ResourceCapError);
}

#include "pepsmqc/honeycomb.hpp"

#include <cmath>
#include <json.hpp>

#include "pepsmqc/errors.hpp"

namespace pepsmqc::honeycomb {
namespace {

const double kRoot2 = std::sqrt(2.0);

CMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

CVector vec4(cplx a, cplx b, cplx c, cplx d) {
    CVector v(4);
    v << a, b, c, d;
    return v;
}

void check_outcome(int k, const char* what) {
    if (k < 0 || k > 3) {
        throw InputError(std::string(what) + ": outcome " + std::to_string(k) + " out of range 0..3");
    }
}

CMatrix hadamard() { return mat2(1, 1, 1, -1) / kRoot2; }

std::vector<CMatrix> vertical_kets() {
    return {mat2(1, 0, 0, 0).col(0), mat2(1, 0, 0, 0).col(0), mat2(0, 0, 1, 0).col(0),
            mat2(0, 0, 1, 0).col(0)};
}

SiteTensor make_circle(bool conjugated) {
    const auto kets = vertical_kets();
    std::vector<std::vector<CMatrix>> slices;
    for (int k = 0; k < 4; ++k) {
        CMatrix b = circle_horizontal()[static_cast<std::size_t>(k)];
        if (conjugated) {
            b = pauli::X() * b * pauli::X();
        }
        std::vector<CMatrix> level;
        for (int v = 0; v < 2; ++v) {
            level.push_back(kets[static_cast<std::size_t>(k)](v, 0) * b);
        }
        slices.push_back(std::move(level));
    }
    return SiteTensor(std::move(slices));
}

// Mid-square outcome m uses Table I vector kMidOrder[m].
constexpr int kMidOrder[4] = {0, 1, 3, 2};

nlohmann::json matrix_json(const CMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json vector_json(const CVector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back({v(i).real(), v(i).imag()});
    }
    return out;
}

}  // namespace

const MatrixList& square_list() {
    static const MatrixList list({mat2(1, 0, 0, 1) / kRoot2, mat2(0, 1, kI, 0) / kRoot2,
                                  mat2(0, kI, 1, 0) / kRoot2, mat2(1, 0, 0, -1) / kRoot2});
    return list;
}

const MatrixList& circle_horizontal() {
    static const MatrixList list({pauli::I(), pauli::X(), pauli::Z(), CMatrix(pauli::Z() * pauli::X())});
    return list;
}

const SiteTensor& circle_tensor() {
    static const SiteTensor t = make_circle(false);
    return t;
}

const SiteTensor& circle_tensor_conjugated() {
    static const SiteTensor t = make_circle(true);
    return t;
}

PhasedPauli circle_pauli(int k, bool conjugated) {
    check_outcome(k, "circle_pauli");
    static const PhasedPauli plain[4] = {
        {Pauli::I, 1.0}, {Pauli::X, 1.0}, {Pauli::Z, 1.0}, {Pauli::Y, kI}};
    static const PhasedPauli flipped[4] = {
        {Pauli::I, 1.0}, {Pauli::X, 1.0}, {Pauli::Z, -1.0}, {Pauli::Y, -kI}};
    return conjugated ? flipped[k] : plain[k];
}

const std::array<CMatrix, 4>& e_mid() {
    static const std::array<CMatrix, 4> list = {kron(pauli::I(), pauli::I()), kron(pauli::I(), pauli::X()),
                                                kron(pauli::X(), pauli::I()), kron(pauli::X(), pauli::X())};
    return list;
}

const std::array<CMatrix, 4>& e_left() {
    static const std::array<CMatrix, 4> list = {pauli::I(), pauli::X(), pauli::X(), pauli::I()};
    return list;
}

const std::array<CMatrix, 4>& e_right() {
    static const std::array<CMatrix, 4> list = {pauli::I(), pauli::I(), pauli::X(), pauli::X()};
    return list;
}

int mid_outcome_sigma(int m) {
    check_outcome(m, "mid_outcome_sigma");
    return kMidOrder[m];
}

Su2Rep su2_representative(const CMatrix& u) {
    if (u.rows() != 2 || u.cols() != 2 || !is_unitary(u, 1e-10)) {
        throw InputError("su2_representative: expected a 2x2 unitary");
    }
    const cplx factor = principal_sqrt(u.determinant());
    return {u / factor, factor};
}

MeasurementBasis single_qubit_basis(const CMatrix& u) {
    if (u.rows() != 2 || u.cols() != 2 || !is_unitary(u, 1e-10)) {
        throw InputError("single_qubit_basis: expected a 2x2 unitary");
    }
    if (std::abs(u.determinant() - 1.0) > 1e-10) {
        throw InputError("single_qubit_basis: det U must be 1");
    }
    const cplx a = u(0, 0);
    const cplx b = u(0, 1);
    const cplx ac = std::conj(a);
    const cplx bc = std::conj(b);
    std::vector<CVector> v = {
        vec4(a + ac, bc - kI * b, kI * bc - b, ac - a),
        vec4(bc - b, a + kI * ac, ac + kI * a, -bc - b),
        vec4(-kI * b - kI * bc, ac + kI * a, -kI * ac - a, -kI * b + kI * bc),
        vec4(ac - a, bc + kI * b, b + kI * bc, a + ac),
    };
    for (auto& x : v) {
        x /= 2.0;  // printed vectors have norm sqrt 2, plus the table's own 1/sqrt 2
    }
    return MeasurementBasis(std::move(v));
}

const MeasurementBasis& entangler_mid_basis() {
    static const MeasurementBasis basis = [] {
        const MeasurementBasis table = single_qubit_basis(kI * hadamard());
        std::vector<CVector> v;
        for (int m = 0; m < 4; ++m) {
            v.push_back(table[static_cast<std::size_t>(kMidOrder[m])]);
        }
        return MeasurementBasis(std::move(v));
    }();
    return basis;
}

const MeasurementBasis& entangler_circle_basis() {
    static const MeasurementBasis basis({vec4(1, 0, 1, 0) / kRoot2, vec4(0, 1, 0, -1) / kRoot2,
                                         vec4(1, 0, -1, 0) / kRoot2, vec4(0, 1, 0, 1) / kRoot2});
    return basis;
}

cplx c_coefficient(int s, int t, int m) {
    check_outcome(s, "c_coefficient");
    check_outcome(t, "c_coefficient");
    check_outcome(m, "c_coefficient");
    const CMatrix g = pauli::sigma()[static_cast<std::size_t>(kMidOrder[m])] * mat2(1, 1, 1, -1);
    const auto kets = vertical_kets();
    return (kets[static_cast<std::size_t>(s)].transpose() * g * kets[static_cast<std::size_t>(t)])(0, 0);
}

const CMatrix& cz() {
    static const CMatrix m = [] {
        CMatrix c = CMatrix::Identity(4, 4);
        c(3, 3) = -1.0;
        return c;
    }();
    return m;
}

CMatrix cz_block(int d, int m, int u) {
    check_outcome(d, "cz_block");
    check_outcome(m, "cz_block");
    check_outcome(u, "cz_block");
    const CMatrix bond = project_site(square_list(), entangler_mid_basis()[static_cast<std::size_t>(m)]);
    const auto& psi = entangler_circle_basis();
    return vertical_contract(circle_tensor(), circle_tensor(), psi[static_cast<std::size_t>(u)],
                             psi[static_cast<std::size_t>(d)], bond);
}

CMatrix cz_block_formula(int d, int m, int u) {
    check_outcome(d, "cz_block_formula");
    check_outcome(m, "cz_block_formula");
    check_outcome(u, "cz_block_formula");
    const auto& psi = entangler_circle_basis();
    CMatrix out = CMatrix::Zero(4, 4);
    for (int s = 0; s < 4; ++s) {
        for (int t = 0; t < 4; ++t) {
            const cplx w = std::conj(psi[static_cast<std::size_t>(d)](s)) *
                           std::conj(psi[static_cast<std::size_t>(u)](t)) * c_coefficient(s, t, m);
            if (w != cplx{0.0}) {
                out += w * kron(circle_horizontal()[static_cast<std::size_t>(t)],
                                circle_horizontal()[static_cast<std::size_t>(s)]);
            }
        }
    }
    return out;
}

CMatrix cz_block_reference(int d, int m, int u) {
    check_outcome(d, "cz_block_reference");
    check_outcome(m, "cz_block_reference");
    check_outcome(u, "cz_block_reference");
    // e_mid is written lower-first; swap its factors for the upper-first order.
    static const std::array<CMatrix, 4> mid_upper_first = {e_mid()[0], e_mid()[2], e_mid()[1], e_mid()[3]};
    const auto& em = mid_upper_first[static_cast<std::size_t>(m)];
    return em * kron(e_left()[static_cast<std::size_t>(u)], e_left()[static_cast<std::size_t>(d)]) * cz() *
           kron(e_right()[static_cast<std::size_t>(u)], e_right()[static_cast<std::size_t>(d)]) * em;
}

CzByproduct cz_byproduct(int d, int m, int u) {
    const CMatrix local = cz_block(d, m, u) * cz();
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
            const CMatrix p = kron(pauli::sigma()[static_cast<std::size_t>(x)],
                                   pauli::sigma()[static_cast<std::size_t>(y)]);
            const cplx c = (p.adjoint() * local).trace() / 4.0;
            if (std::abs(c) > 1e-12 && (local - c * p).norm() <= 1e-10 * local.norm()) {
                const PhasedPauli snapped = identify_pauli(c * pauli::I());
                return {static_cast<Pauli>(x), static_cast<Pauli>(y), snapped.phase, std::abs(c)};
            }
        }
    }
    throw Error("cz_byproduct: outcome block is not a local Pauli times CZ");
}

EdgeRemoval edge_removal_basis(int outcome) {
    check_outcome(outcome, "edge_removal_basis");
    const double s = 2.0 * kRoot2;
    static const CVector vectors[4] = {
        vec4(2, cplx(1, 1), cplx(1, 1), 0) / s,
        vec4(0, cplx(-1, 1), cplx(1, -1), 2) / s,
        vec4(0, cplx(1, -1), cplx(-1, 1), 2) / s,
        vec4(2, cplx(-1, -1), cplx(-1, -1), 0) / s,
    };
    const CVector& v = vectors[outcome];
    return {v, project_site(square_list(), v), outcome == 1 || outcome == 3, outcome == 2 || outcome == 3};
}

const MeasurementBasis& edge_removal_measurement() {
    static const MeasurementBasis basis({edge_removal_basis(0).vector, edge_removal_basis(1).vector,
                                         edge_removal_basis(2).vector, edge_removal_basis(3).vector});
    return basis;
}

EdgeRemovalRule edge_removal_byproduct(int outcome) {
    const EdgeRemoval r = edge_removal_basis(outcome);
    const MatrixList flipped = circle_horizontal().sandwiched(pauli::X(), pauli::X());
    return {r.flip_upper ? flipped : circle_horizontal(), r.flip_lower ? flipped : circle_horizontal()};
}

const ReadoutMap& readout_map() {
    static const ReadoutMap map = [] {
        CMatrix r(4, 2);
        const CVector left = vec4(1, 0, 0, 0).head(2);
        for (int i = 0; i < 4; ++i) {
            r.row(i) = left.transpose() * square_list()[static_cast<std::size_t>(i)];
        }
        return ReadoutMap(r, 1.0);
    }();
    return map;
}

int readout_bit(int level) {
    check_outcome(level, "readout_bit");
    return (level == 1 || level == 2) ? 1 : 0;
}

CMatrix readout_projector(int bit) {
    if (bit != 0 && bit != 1) {
        throw InputError("readout_projector: bit must be 0 or 1");
    }
    CMatrix p = CMatrix::Zero(4, 4);
    for (int level = 0; level < 4; ++level) {
        if (readout_bit(level) == bit) {
            p(level, level) = 1.0;
        }
    }
    return p;
}

std::string dump_constants() {
    nlohmann::json j;
    j["schema"] = "peps-mqc/1";
    auto list_json = [](const MatrixList& list) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& m : list.entries()) {
            out.push_back(matrix_json(m));
        }
        return out;
    };
    auto basis_json = [](const MeasurementBasis& basis) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& v : basis.vectors()) {
            out.push_back(vector_json(v));
        }
        return out;
    };
    j["square_list"] = list_json(square_list());
    j["circle_horizontal"] = list_json(circle_horizontal());
    j["circle_vertical_kets"] = nlohmann::json::array({0, 0, 1, 1});
    j["e_mid_lower_first"] = nlohmann::json::array();
    for (const auto& m : e_mid()) {
        j["e_mid_lower_first"].push_back(matrix_json(m));
    }
    j["e_left"] = nlohmann::json::array();
    j["e_right"] = nlohmann::json::array();
    for (int k = 0; k < 4; ++k) {
        j["e_left"].push_back(matrix_json(e_left()[static_cast<std::size_t>(k)]));
        j["e_right"].push_back(matrix_json(e_right()[static_cast<std::size_t>(k)]));
    }
    j["mid_outcome_sigma"] = nlohmann::json::array({0, 1, 3, 2});
    j["entangler_mid_basis"] = basis_json(entangler_mid_basis());
    j["entangler_circle_basis"] = basis_json(entangler_circle_basis());
    j["edge_removal_basis"] = basis_json(edge_removal_measurement());
    j["readout"] = {{"matrix", matrix_json(readout_map().matrix())}, {"alpha", readout_map().alpha()}};
    nlohmann::json c0 = nlohmann::json::array();
    for (int s = 0; s < 4; ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (int t = 0; t < 4; ++t) {
            row.push_back(c_coefficient(s, t, 0).real());
        }
        c0.push_back(row);
    }
    j["c_table_m0"] = c0;
    return j.dump(2);
}

}  // namespace pepsmqc::honeycomb

#include "pepsmqc/correlation.hpp"

#include <cmath>
#include <string>

#include "pepsmqc/errors.hpp"

namespace pepsmqc {

MatrixList::MatrixList(std::vector<CMatrix> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw InputError("MatrixList: empty list");
    }
    const auto d = entries_.front().rows();
    for (const auto& m : entries_) {
        if (m.rows() != d || m.cols() != d || d == 0) {
            throw InputError("MatrixList: entries must be square and of equal shape");
        }
    }
}

bool MatrixList::is_orthonormal(double tol) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            const cplx ip = (entries_[i].adjoint() * entries_[j]).trace();
            if (std::abs(ip - (i == j ? cplx{1.0} : cplx{0.0})) > tol) {
                return false;
            }
        }
    }
    return true;
}

MatrixList MatrixList::sandwiched(const CMatrix& left, const CMatrix& right) const {
    std::vector<CMatrix> out;
    out.reserve(entries_.size());
    for (const auto& m : entries_) {
        out.push_back(left * m * right);
    }
    return MatrixList(std::move(out));
}

BoundaryPair::BoundaryPair(CVector l, CVector r) : left(std::move(l)), right(std::move(r)) {
    if (left.size() == 0 || right.size() == 0 || left.norm() == 0.0 || right.norm() == 0.0) {
        throw InputError("BoundaryPair: boundary vectors must be nonzero");
    }
    if (left.size() != right.size()) {
        throw InputError("BoundaryPair: boundary dimensions differ");
    }
}

MeasurementBasis::MeasurementBasis(std::vector<CVector> vectors, double tol)
    : vectors_(std::move(vectors)) {
    const auto d = static_cast<Eigen::Index>(vectors_.size());
    if (d == 0) {
        throw InputError("MeasurementBasis: no vectors");
    }
    for (const auto& v : vectors_) {
        if (v.size() != d) {
            throw InputError("MeasurementBasis: expected " + std::to_string(d) + " vectors of dimension " +
                             std::to_string(d));
        }
    }
    if ((gram() - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol) {
        throw InputError("MeasurementBasis: vectors are not orthonormal");
    }
}

CMatrix MeasurementBasis::gram() const {
    const auto d = static_cast<Eigen::Index>(vectors_.size());
    CMatrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            g(i, j) = vectors_[i].dot(vectors_[j]);
        }
    }
    return g;
}

void MeasurementBasis::check_invertible_on(const MatrixList& list, double max_condition) const {
    for (std::size_t k = 0; k < vectors_.size(); ++k) {
        const Eigen::JacobiSVD<CMatrix> svd(project_site(list, vectors_[k]));
        const auto& s = svd.singularValues();
        const double smin = s(s.size() - 1);
        if (smin == 0.0 || s(0) / smin >= max_condition) {
            throw InputError("MeasurementBasis: outcome " + std::to_string(k) +
                             " projects to a singular operator");
        }
    }
}

SiteTensor::SiteTensor(std::vector<std::vector<CMatrix>> slices) : slices_(std::move(slices)) {
    if (slices_.empty() || slices_.front().empty()) {
        throw InputError("SiteTensor: empty tensor");
    }
    const auto vdim = slices_.front().size();
    const auto d = slices_.front().front().rows();
    for (const auto& level : slices_) {
        if (level.size() != vdim) {
            throw InputError("SiteTensor: inconsistent vertical dimension");
        }
        for (const auto& m : level) {
            if (m.rows() != d || m.cols() != d) {
                throw InputError("SiteTensor: inconsistent horizontal shape");
            }
        }
    }
}

Eigen::Index SiteTensor::dim() const { return slices_.empty() ? 0 : slices_.front().front().rows(); }

MatrixList SiteTensor::close_vertical(const CVector& v) const {
    if (static_cast<std::size_t>(v.size()) != vertical_dim()) {
        throw InputError("SiteTensor::close_vertical: dimension mismatch");
    }
    std::vector<CMatrix> out;
    out.reserve(slices_.size());
    for (const auto& level : slices_) {
        CMatrix m = CMatrix::Zero(dim(), dim());
        for (std::size_t b = 0; b < level.size(); ++b) {
            m += v(static_cast<Eigen::Index>(b)) * level[b];
        }
        out.push_back(std::move(m));
    }
    return MatrixList(std::move(out));
}

ReadoutMap::ReadoutMap(CMatrix r, double alpha) : r_(std::move(r)), alpha_(alpha) {
    if (!(alpha_ > 0.0)) {
        throw InputError("ReadoutMap: alpha must be positive");
    }
    if (r_.cols() == 0 || r_.rows() < r_.cols()) {
        throw InputError("ReadoutMap: R must be d x D with d >= D");
    }
    const CMatrix gram = r_.adjoint() * r_;
    const double scale = gram.trace().real() / static_cast<double>(r_.cols());
    if (scale <= 0.0 ||
        (gram - scale * CMatrix::Identity(r_.cols(), r_.cols())).norm() > 1e-10 * scale) {
        throw InputError("ReadoutMap: columns must be orthogonal with equal norms");
    }
}

cplx mps_amplitude(std::span<const MatrixList> lists, const BoundaryPair& boundary,
                   std::span<const int> levels) {
    if (lists.size() != levels.size()) {
        throw InputError("mps_amplitude: one level per site required");
    }
    CVector state = boundary.right;
    for (std::size_t s = 0; s < lists.size(); ++s) {
        const auto& list = lists[s];
        if (list.dim() != state.size()) {
            throw InputError("mps_amplitude: dimension mismatch at site " + std::to_string(s + 1));
        }
        if (levels[s] < 0 || static_cast<std::size_t>(levels[s]) >= list.arity()) {
            throw InputError("mps_amplitude: level out of range at site " + std::to_string(s + 1));
        }
        state = list[static_cast<std::size_t>(levels[s])] * state;
    }
    if (boundary.left.size() != state.size()) {
        throw InputError("mps_amplitude: left boundary dimension mismatch");
    }
    return (boundary.left.transpose() * state)(0);
}

CMatrix project_site(const MatrixList& list, const CVector& state) {
    if (static_cast<std::size_t>(state.size()) != list.arity()) {
        throw InputError("project_site: state dimension " + std::to_string(state.size()) +
                         " does not match list arity " + std::to_string(list.arity()));
    }
    CMatrix out = CMatrix::Zero(list.dim(), list.dim());
    for (std::size_t i = 0; i < list.arity(); ++i) {
        out += std::conj(state(static_cast<Eigen::Index>(i))) * list[i];
    }
    return out;
}

CMatrix gate_product(std::span<const CMatrix> ops, Eigen::Index dim) {
    if (ops.empty()) {
        return CMatrix::Identity(dim, dim);
    }
    CMatrix out = ops.front();
    for (std::size_t i = 1; i < ops.size(); ++i) {
        if (ops[i].rows() != out.rows() || ops[i].cols() != ops[i].rows()) {
            throw InputError("gate_product: operators must be square and of equal size");
        }
        out = ops[i] * out;
    }
    if (out.rows() != out.cols()) {
        throw InputError("gate_product: operators must be square");
    }
    return out;
}

CMatrix byproduct_of(const CMatrix& actual, const CMatrix& intended) {
    if (actual.rows() != intended.rows() || actual.cols() != intended.cols() ||
        intended.rows() != intended.cols()) {
        throw InputError("byproduct_of: shape mismatch");
    }
    const Eigen::FullPivLU<CMatrix> lu(intended);
    if (!lu.isInvertible()) {
        throw InputError("byproduct_of: intended operator is singular");
    }
    return actual * lu.inverse();
}

CVector readout_apply(const ReadoutMap& map, const CMatrix& frame, const CVector& state) {
    if (frame.rows() != map.matrix().cols() || state.size() != frame.cols()) {
        throw InputError("readout_apply: dimension mismatch");
    }
    if (!is_unitary(frame, 1e-10)) {
        throw InputError("readout_apply: frame must be unitary");
    }
    if (state.norm() == 0.0) {
        throw InputError("readout_apply: zero input state");
    }
    CVector out = map.alpha() * map.matrix() * frame * state;
    return out / out.norm();
}

CMatrix vertical_contract(const SiteTensor& upper, const SiteTensor& lower, const CVector& up_state,
                          const CVector& down_state, const CMatrix& bond) {
    if (static_cast<std::size_t>(up_state.size()) != upper.arity() ||
        static_cast<std::size_t>(down_state.size()) != lower.arity()) {
        throw InputError("vertical_contract: state dimension mismatch");
    }
    if (static_cast<std::size_t>(bond.rows()) != lower.vertical_dim() ||
        static_cast<std::size_t>(bond.cols()) != upper.vertical_dim()) {
        throw InputError("vertical_contract: bond shape mismatch");
    }
    auto leg_operators = [](const SiteTensor& t, const CVector& state) {
        std::vector<CMatrix> legs(t.vertical_dim(), CMatrix::Zero(t.dim(), t.dim()));
        for (std::size_t k = 0; k < t.arity(); ++k) {
            const cplx w = std::conj(state(static_cast<Eigen::Index>(k)));
            for (std::size_t b = 0; b < t.vertical_dim(); ++b) {
                legs[b] += w * t.slice(k, b);
            }
        }
        return legs;
    };
    const auto up = leg_operators(upper, up_state);
    const auto down = leg_operators(lower, down_state);
    const auto n = upper.dim() * lower.dim();
    CMatrix out = CMatrix::Zero(n, n);
    for (Eigen::Index a = 0; a < bond.rows(); ++a) {
        for (Eigen::Index b = 0; b < bond.cols(); ++b) {
            if (bond(a, b) != cplx{0.0}) {
                out += bond(a, b) * kron(up[static_cast<std::size_t>(b)], down[static_cast<std::size_t>(a)]);
            }
        }
    }
    return out;
}

std::optional<LocalPair> locality_condition(const CMatrix& w, const CMatrix& e, const CMatrix& f,
                                            double tol) {
    if (w.rows() != 4 || w.cols() != 4 || e.rows() != 2 || e.cols() != 2 || f.rows() != 2 ||
        f.cols() != 2) {
        throw InputError("locality_condition: expected a 4x4 gate and 2x2 by-products");
    }
    if (!is_unitary(w) || !is_unitary(e) || !is_unitary(f)) {
        throw InputError("locality_condition: inputs must be unitary");
    }
    const CMatrix conjugated = w * kron(e, f) * w.adjoint();
    if (operator_schmidt_rank(conjugated, tol) != 1) {
        return std::nullopt;
    }
    auto [g, h] = factor_product(conjugated);
    const cplx root = std::sqrt(h.determinant());
    h /= root;
    g *= root;
    return LocalPair{g, h};
}

CVector hs_coefficients(const MatrixList& basis, const CMatrix& m) {
    if (m.rows() != basis.dim() || m.cols() != basis.dim()) {
        throw InputError("hs_coefficients: shape mismatch");
    }
    CVector c(static_cast<Eigen::Index>(basis.arity()));
    for (std::size_t i = 0; i < basis.arity(); ++i) {
        const cplx norm = (basis[i].adjoint() * basis[i]).trace();
        c(static_cast<Eigen::Index>(i)) = (basis[i].adjoint() * m).trace() / norm;
    }
    return c;
}

}  // namespace pepsmqc

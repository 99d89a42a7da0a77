#include "pepsmqc/crossing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

#include "pepsmqc/errors.hpp"
#include "pepsmqc/json_io.hpp"

namespace pepsmqc::crossing {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI{0.0, 1.0};

// Angle difference folded into (-pi, pi].
double wrap(double x) {
    x = std::remainder(x, 2.0 * kPi);
    return x <= -kPi ? x + 2.0 * kPi : x;
}

std::optional<Pauli> pauli_label(const CMatrix& a, double tol = 1e-9) {
    const double norm = a.norm();
    for (int k = 0; k < 4; ++k) {
        const cplx c = (pauli::sigma()[static_cast<std::size_t>(k)].adjoint() * a).trace() / 2.0;
        if (std::abs(std::abs(c) * std::sqrt(2.0) - norm) < tol * std::max(1.0, norm)) {
            return static_cast<Pauli>(k);
        }
    }
    return std::nullopt;
}

Eigen::Matrix4d plane_rotation(const Plane& p, double theta) {
    Eigen::Matrix4d r = Eigen::Matrix4d::Identity();
    r(p.first, p.first) = r(p.second, p.second) = std::cos(theta);
    r(p.first, p.second) = -std::sin(theta);
    r(p.second, p.first) = std::sin(theta);
    return r;
}

CMatrix from_magic(const Eigen::Matrix4d& o) {
    return magic_basis() * o.cast<cplx>() * magic_basis().adjoint();
}

// Real orthogonal image of a local unitary, or nothing if u is not local.
std::optional<Eigen::Matrix4d> to_magic(const CMatrix& u, double tol) {
    if (u.rows() != 4 || u.cols() != 4 || !is_unitary(u, tol)) {
        return std::nullopt;
    }
    CMatrix o = magic_basis().adjoint() * u * magic_basis();
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    o.cwiseAbs().maxCoeff(&r, &c);
    o *= std::conj(o(r, c)) / std::abs(o(r, c));
    if (o.imag().norm() > tol) {
        return std::nullopt;
    }
    Eigen::Matrix4d real = o.real();
    if (real.determinant() < 0.0) {
        return std::nullopt;
    }
    return real;
}

std::string continuous_text(std::vector<Plane> planes) {
    std::sort(planes.begin(), planes.end());
    if (planes.size() == 6) {
        return "U(2)⊗U(2)";
    }
    const std::vector<std::pair<std::vector<Plane>, char>> axis_pairs = {
        {{{0, 1}, {2, 3}}, 'X'}, {{{0, 2}, {1, 3}}, 'Y'}, {{{0, 3}, {1, 2}}, 'Z'}};
    for (const auto& [set, axis] : axis_pairs) {
        if (planes == set) {
            return std::string(1, axis) + "(θ1)⊗" + std::string(1, axis) + "(θ2)";
        }
    }
    std::string out;
    for (std::size_t i = 0; i < planes.size(); ++i) {
        if (!out.empty()) {
            out += "·";
        }
        out += "L" + plane_name(planes[i]) + "(θ" + std::to_string(i + 1) + ")";
    }
    return out;
}

// Axis shared by both factors when the continuous part is P(t1) (x) P(t2).
std::optional<Pauli> axis_of(std::vector<Plane> planes) {
    std::sort(planes.begin(), planes.end());
    if (planes == std::vector<Plane>{{0, 1}, {2, 3}}) return Pauli::X;
    if (planes == std::vector<Plane>{{0, 2}, {1, 3}}) return Pauli::Y;
    if (planes == std::vector<Plane>{{0, 3}, {1, 2}}) return Pauli::Z;
    return std::nullopt;
}

std::string family_text(const LocalFamily& f) {
    const std::string cont = continuous_text(f.planes);
    if (f.planes.size() == 6) {
        return cont;
    }
    std::string out = cont;
    out += out.empty() ? "L0(i)" : "·L0(i)";
    if (!f.coset_label.empty()) {
        out += "·" + f.coset_label;
    }
    return out;
}

// Pauli pair of a local gate, if it is one.
std::optional<std::pair<Pauli, Pauli>> pauli_pair(const CMatrix& u) {
    if (operator_schmidt_rank(u, 1e-9) != 1) {
        return std::nullopt;
    }
    const auto [a, b] = factor_product(u);
    const auto pa = pauli_label(a);
    const auto pb = pauli_label(b);
    if (!pa || !pb) {
        return std::nullopt;
    }
    return std::pair{*pa, *pb};
}

}  // namespace

void CanonicalGate::validate() const {
    for (double v : {alpha, beta, gamma}) {
        if (!std::isfinite(v) || v < 0.0 || v >= kPi) {
            throw InputError("canonical gate: parameters must lie in [0, pi)");
        }
    }
}

CMatrix CanonicalGate::matrix() const {
    const CMatrix id = CMatrix::Identity(4, 4);
    auto factor = [&](const CMatrix& p, double t) {
        return CMatrix(std::cos(t / 2.0) * id + kI * std::sin(t / 2.0) * kron(p, p));
    };
    return factor(pauli::X(), alpha) * factor(pauli::Y(), beta) * factor(pauli::Z(), gamma);
}

std::array<double, 4> CanonicalGate::phases() const {
    return {alpha - beta + gamma, alpha + beta - gamma, -alpha - beta - gamma, -alpha + beta + gamma};
}

const CMatrix& magic_basis() {
    static const CMatrix q = [] {
        CMatrix m(4, 4);
        m << 1, 0, 0, kI,  //
            0, kI, 1, 0,   //
            0, kI, -1, 0,  //
            1, 0, 0, -kI;
        return CMatrix(m / std::sqrt(2.0));
    }();
    return q;
}

CMatrix magic_transform(const CMatrix& k) {
    if (k.rows() != 4 || k.cols() != 4 || !is_unitary(k, 1e-10)) {
        throw InputError("magic_transform: expected a 4x4 unitary");
    }
    return magic_basis().adjoint() * k * magic_basis();
}

PhaseFilter filter_matrix(const CanonicalGate& g, double tol) {
    const auto th = g.phases();
    PhaseFilter pf;
    pf.f = CMatrix(4, 4);
    std::vector<double> etas;  // representative eta per class
    std::vector<double> raw;   // unsnapped eta of the first member, to detect near merges
    Eigen::Matrix4i which;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double diff = th[static_cast<std::size_t>(i)] - th[static_cast<std::size_t>(j)];
            pf.f(i, j) = std::exp(kI * diff);
            // F_ij = exp(2 i eta) with eta in [0, pi).
            double eta = wrap(diff) / 2.0;
            if (eta < 0.0) {
                eta += kPi;
            }
            if (std::abs(eta - kPi) < tol) {
                eta = 0.0;
            }
            int cls = -1;
            for (std::size_t c = 0; c < etas.size(); ++c) {
                const double d = std::abs(wrap(2.0 * (eta - etas[c])));
                if (d < 2.0 * tol) {
                    cls = static_cast<int>(c);
                    if (d != 0.0) {
                        pf.near_merge = true;
                    }
                    break;
                }
            }
            if (cls < 0) {
                cls = static_cast<int>(etas.size());
                etas.push_back(eta);
            }
            which(i, j) = cls;
        }
    }
    std::vector<std::size_t> order(etas.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return etas[a] < etas[b]; });
    for (std::size_t c : order) {
        PhaseClass pc;
        pc.eta = etas[c];
        pc.support = (which.array() == static_cast<int>(c)).cast<int>();
        pf.classes.push_back(pc);
    }
    return pf;
}

std::string plane_name(const Plane& p) { return std::to_string(p.first + 1) + std::to_string(p.second + 1); }

CMatrix plane_local_gate(const Plane& p, double theta) {
    if (p.first < 0 || p.second > 3 || p.first >= p.second) {
        throw InputError("plane_local_gate: invalid plane");
    }
    return from_magic(plane_rotation(p, theta));
}

CMatrix LocalFamily::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    Eigen::Matrix4d o = Eigen::Matrix4d::Identity();
    for (const auto& p : planes) {
        o = o * plane_rotation(p, angle(rng));
    }
    // Even reflection: flip signs on an even subset.
    std::uniform_int_distribution<int> pick(0, 7);
    const int bits = pick(rng);
    Eigen::Vector4d signs = Eigen::Vector4d::Ones();
    for (int k = 0; k < 3; ++k) {
        if ((bits >> k) & 1) {
            signs(k) = -signs(k);
        }
    }
    if (signs.prod() < 0.0) {
        signs(3) = -1.0;
    }
    o = o * signs.asDiagonal();
    return from_magic(o * coset);
}

bool LocalFamily::contains(const CMatrix& u, double tol) const {
    const auto o = to_magic(u, tol);
    if (!o) {
        return false;
    }
    // Block pattern of the phase-zero group.
    Eigen::Matrix4i allowed = Eigen::Matrix4i::Identity();
    for (const auto& p : planes) {
        allowed(p.first, p.second) = allowed(p.second, p.first) = 1;
    }
    const Eigen::Matrix4d base = *o * coset.transpose();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (allowed(i, j) == 0 && std::abs(base(i, j)) > tol) {
                return false;
            }
        }
    }
    return true;
}

bool CrossingSolution::contains(const CMatrix& u, double tol) const {
    return std::any_of(families.begin(), families.end(), [&](const LocalFamily& f) { return f.contains(u, tol); });
}

CrossingSolution solve_patterns(const PhaseFilter& filter) {
    if (filter.classes.empty() || filter.classes.front().eta != 0.0 ||
        filter.classes.front().support.diagonal() != Eigen::Vector4i::Ones()) {
        throw InputError("solve_patterns: the filter must have a phase-zero class holding the diagonal");
    }
    CrossingSolution out;
    out.filter = filter;

    // Phase-zero support is an equivalence relation; its blocks carry full rotation groups.
    const Eigen::Matrix4i& zero = filter.classes.front().support;
    std::vector<Plane> planes;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            if (zero(i, j) != 0) {
                planes.emplace_back(i, j);
            }
        }
    }

    for (const auto& cls : filter.classes) {
        LocalFamily fam;
        fam.eta = cls.eta;
        fam.planes = planes;
        bool found = cls.eta == 0.0;
        if (!found) {
            // Any one signed permutation inside the class fixes the whole coset.
            std::array<int, 4> perm{0, 1, 2, 3};
            do {
                bool fits = true;
                for (int i = 0; i < 4 && fits; ++i) {
                    fits = cls.support(i, perm[static_cast<std::size_t>(i)]) != 0;
                }
                if (fits) {
                    Eigen::Matrix4d t = Eigen::Matrix4d::Zero();
                    for (int i = 0; i < 4; ++i) {
                        t(i, perm[static_cast<std::size_t>(i)]) = 1.0;
                    }
                    if (t.determinant() < 0.0) {
                        t.row(0) *= -1.0;
                    }
                    fam.coset = t;
                    found = true;
                }
            } while (!found && std::next_permutation(perm.begin(), perm.end()));
        }
        if (!found) {
            out.unsolved.push_back(cls.eta);
            continue;
        }
        if (cls.eta != 0.0) {
            const CMatrix gate = from_magic(fam.coset);
            if (const auto pp = pauli_pair(gate)) {
                fam.coset_label = std::string(1, pauli_char(pp->first)) + "⊗" + std::string(1, pauli_char(pp->second));
            } else {
                fam.coset_label = "T[";
                for (int i = 0; i < 4; ++i) {
                    Eigen::Index c = 0;
                    fam.coset.row(i).cwiseAbs().maxCoeff(&c);
                    fam.coset_label += std::to_string(c + 1);
                }
                fam.coset_label += "]";
            }
        }
        fam.template_text = family_text(fam);
        out.families.push_back(std::move(fam));
    }

    // Merge into P(t1)S(i) (x) P(t2)S(j) when the discrete parts cover every
    // Pauli pair modulo the rotation axis.
    bool merged = false;
    if (const auto axis = axis_of(planes); axis && out.families.size() > 1) {
        std::set<std::pair<int, int>> covered;
        bool all_pauli = true;
        auto reduce = [&](Pauli p) { return p == Pauli::I || p == *axis ? 0 : 1; };
        for (const auto& f : out.families) {
            const auto coset_pair =
                f.coset_label.empty() ? std::optional(std::pair{Pauli::I, Pauli::I}) : pauli_pair(from_magic(f.coset));
            if (!coset_pair) {
                all_pauli = false;
                break;
            }
            for (int s = 0; s < 4; ++s) {
                const auto a = pauli_product(static_cast<Pauli>(s), coset_pair->first).label;
                const auto b = pauli_product(static_cast<Pauli>(s), coset_pair->second).label;
                covered.emplace(reduce(a), reduce(b));
            }
        }
        if (all_pauli && covered.size() == 4) {
            const std::string p(1, pauli_char(*axis));
            out.templates.push_back(p + "(θ1)Σ(i)⊗" + p + "(θ2)Σ(j)");
            merged = true;
        }
    }
    if (!merged) {
        for (const auto& f : out.families) {
            out.templates.push_back(f.template_text);
        }
    }
    return out;
}

bool crosses_locally(const CanonicalGate& g, const CMatrix& u, double tol) {
    const CMatrix w = g.matrix();
    const CMatrix moved = w * u * w.adjoint();
    if (operator_schmidt_rank(moved, tol) != 1) {
        return false;
    }
    const auto [a, b] = factor_product(moved);
    return is_unitary(a, 1e-9) && is_unitary(b, 1e-9);
}

VerificationReport verify_family(const CanonicalGate& g, const LocalFamily& family, std::size_t samples,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    VerificationReport r;
    for (std::size_t s = 0; s < samples; ++s) {
        if (crosses_locally(g, family.sample(rng))) {
            ++r.passed;
        } else {
            ++r.failed;
        }
    }
    return r;
}

nlohmann::json solution_to_json(const CrossingSolution& s) {
    nlohmann::json j;
    j["filter"] = {{"f", json_io::matrix_json(s.filter.f)}, {"near_merge", s.filter.near_merge}};
    j["filter"]["classes"] = nlohmann::json::array();
    for (const auto& c : s.filter.classes) {
        nlohmann::json support = nlohmann::json::array();
        for (int i = 0; i < 4; ++i) {
            support.push_back({c.support(i, 0), c.support(i, 1), c.support(i, 2), c.support(i, 3)});
        }
        j["filter"]["classes"].push_back({{"eta", c.eta}, {"support", support}});
    }
    j["families"] = nlohmann::json::array();
    for (const auto& f : s.families) {
        nlohmann::json planes = nlohmann::json::array();
        for (const auto& p : f.planes) {
            planes.push_back(plane_name(p));
        }
        j["families"].push_back({{"eta", f.eta}, {"planes", planes}, {"coset", f.coset_label}, {"template", f.template_text}});
    }
    j["templates"] = s.templates;
    j["unsolved"] = s.unsolved;
    return j;
}

}  // namespace pepsmqc::crossing

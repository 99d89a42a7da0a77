#include "pepsmqc/pauli_frame.hpp"

#include <cmath>

#include "pepsmqc/errors.hpp"

namespace pepsmqc {
namespace {

// Phases here are always powers of i; snap them so long frame histories stay exact.
cplx snap_phase(cplx z) {
    const double r = std::abs(z);
    if (r == 0.0) {
        return z;
    }
    z /= r;
    const cplx quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto& q : quarter) {
        if (std::abs(z - q) < 1e-9) {
            return q;
        }
    }
    return z;
}

struct Tables {
    std::array<std::array<PhasedPauli, 4>, 4> product;
    std::array<std::array<CzPush, 4>, 4> cz;
};

const Tables& tables() {
    static const Tables t = [] {
        Tables out;
        CMatrix cz = CMatrix::Identity(4, 4);
        cz(3, 3) = -1.0;
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                out.product[a][b] = identify_pauli(pauli::sigma()[a] * pauli::sigma()[b]);
                const CMatrix pushed = cz * kron(pauli::sigma()[a], pauli::sigma()[b]) * cz;
                bool found = false;
                for (int x = 0; x < 4 && !found; ++x) {
                    for (int y = 0; y < 4 && !found; ++y) {
                        const CMatrix candidate = kron(pauli::sigma()[x], pauli::sigma()[y]);
                        const cplx c = (candidate.adjoint() * pushed).trace() / 4.0;
                        if (std::abs(std::abs(c) - 1.0) < 1e-12) {
                            out.cz[a][b] = {static_cast<Pauli>(x), static_cast<Pauli>(y), snap_phase(c)};
                            found = true;
                        }
                    }
                }
            }
        }
        return out;
    }();
    return t;
}

}  // namespace

char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
        default: throw InputError(std::string("unknown Pauli label '") + c + "'");
    }
}

const CMatrix& pauli_matrix(Pauli p) { return pauli::sigma()[static_cast<std::size_t>(p)]; }

CMatrix PhasedPauli::matrix() const { return phase * pauli_matrix(label); }

PhasedPauli pauli_product(Pauli a, Pauli b) {
    return tables().product[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

PhasedPauli operator*(const PhasedPauli& a, const PhasedPauli& b) {
    PhasedPauli p = pauli_product(a.label, b.label);
    p.phase = snap_phase(p.phase * a.phase * b.phase);
    return p;
}

PhasedPauli identify_pauli(const CMatrix& m, double tol) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw InputError("identify_pauli: expected a 2x2 matrix");
    }
    const double norm = m.norm();
    if (norm == 0.0) {
        throw InputError("identify_pauli: zero matrix");
    }
    for (int k = 0; k < 4; ++k) {
        const cplx c = (pauli::sigma()[k].adjoint() * m).trace() / 2.0;
        if ((m - c * pauli::sigma()[k]).norm() <= tol * norm) {
            return {static_cast<Pauli>(k), snap_phase(c)};
        }
    }
    throw InputError("identify_pauli: matrix is not proportional to a Pauli");
}

CzPush push_through_cz(Pauli a, Pauli b) {
    return tables().cz[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

PauliFrame::PauliFrame(int wires) : labels_(static_cast<std::size_t>(wires), Pauli::I) {
    if (wires <= 0) {
        throw InputError("PauliFrame: need at least one wire");
    }
}

PauliFrame::PauliFrame(std::vector<Pauli> labels, cplx phase) : labels_(std::move(labels)), phase_(phase) {}

void PauliFrame::apply(int wire, const PhasedPauli& p) {
    auto& slot = labels_.at(static_cast<std::size_t>(wire));
    const PhasedPauli combined = p * PhasedPauli{slot, 1.0};
    slot = combined.label;
    phase_ = snap_phase(phase_ * combined.phase);
}

void PauliFrame::reset(int wire, Pauli label, cplx factor) {
    labels_.at(static_cast<std::size_t>(wire)) = label;
    phase_ *= factor;
}

void PauliFrame::push_cz(int a, int b) {
    auto& la = labels_.at(static_cast<std::size_t>(a));
    auto& lb = labels_.at(static_cast<std::size_t>(b));
    const CzPush p = push_through_cz(la, lb);
    la = p.first;
    lb = p.second;
    phase_ = snap_phase(phase_ * p.phase);
}

bool PauliFrame::flips(int wire) const {
    const Pauli p = label(wire);
    return p == Pauli::X || p == Pauli::Y;
}

unsigned PauliFrame::flip_mask() const {
    unsigned mask = 0;
    for (int w = 0; w < wires(); ++w) {
        mask = (mask << 1) | (flips(w) ? 1U : 0U);
    }
    return mask;
}

CMatrix PauliFrame::matrix() const {
    CMatrix out = CMatrix::Identity(1, 1);
    for (Pauli p : labels_) {
        out = kron(out, pauli_matrix(p));
    }
    return phase_ * out;
}

std::string PauliFrame::to_string() const {
    std::string s;
    for (Pauli p : labels_) {
        s.push_back(pauli_char(p));
    }
    return s;
}

}  // namespace pepsmqc

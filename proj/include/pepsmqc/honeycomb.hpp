#pragma once

// The 4-level honeycomb model: fixed tensors, measurement bases and by-product
// tables for single-qubit gates, the CZ construction, vertical-edge removal and
// readout.
//
// Orientation: correlation flows right to left (new = M * old). The vertical
// bond operator of a mid square has rows on the lower circle's vertical leg
// and columns on the upper circle's. In every two-qubit operator the upper
// wire is the first tensor factor.

#include <array>
#include <string>

#include "pepsmqc/correlation.hpp"
#include "pepsmqc/pauli_frame.hpp"

namespace pepsmqc::honeycomb {

/// Square-site list (I, [[0,1],[i,0]], [[0,i],[1,0]], Z) / sqrt 2.
const MatrixList& square_list();
/// (I, X, Z, ZX)
const MatrixList& circle_horizontal();
/// Circle tensor T(k) = |phi(k)> (x) B(k), |phi(0..3)> = |0>,|0>,|1>,|1>.
const SiteTensor& circle_tensor();
/// Circle tensor with every horizontal matrix conjugated by X.
const SiteTensor& circle_tensor_conjugated();

/// B(k) and X B(k) X as phased Paulis.
PhasedPauli circle_pauli(int k, bool conjugated = false);

/// Per-outcome two-qubit by-product lists of the CZ construction (paper order:
/// lower factor first in E_m).
const std::array<CMatrix, 4>& e_mid();
const std::array<CMatrix, 4>& e_left();
const std::array<CMatrix, 4>& e_right();

/// Which Sigma index the mid-square outcome m realizes in front of H.
/// Outcome labels are (0,1,3,2) of the Table I order; see cz_block.
int mid_outcome_sigma(int m);

/// V = U / sqrt(det U) and the factor sqrt(det U), so U = factor * V.
struct Su2Rep {
    CMatrix v;
    cplx factor;
};
Su2Rep su2_representative(const CMatrix& u);

/// Table I vectors for U = [[a, b], [-b*, a*]], scaled to unit norm. Outcome k
/// realizes A[phi(k)] = Sigma(k) U / sqrt 2. Throws InputError unless U is in SU(2).
MeasurementBasis single_qubit_basis(const CMatrix& u);

/// Mid-square basis of the CZ construction: Table I for iH, outcomes relabeled
/// so that outcome m realizes (I, X, Z, Y)[m] * H up to scale and phase.
const MeasurementBasis& entangler_mid_basis();
/// (1,0,1,0), (0,1,0,-1), (1,0,-1,0), (0,1,0,1), each / sqrt 2.
const MeasurementBasis& entangler_circle_basis();

/// <phi(s)| E_sq(m) H' |phi(t)> with H' = [[1,1],[1,-1]] (H without its 1/sqrt 2).
cplx c_coefficient(int s, int t, int m);

/// Measured two-qubit operator for outcomes (lower, mid, upper), contracted
/// from the site tensors; upper wire is the first factor.
CMatrix cz_block(int d, int m, int u);
/// The same operator from the closed form sum conj(psi_d(s)) conj(psi_u(t)) c(s,t;m) B(t) (x) B(s).
CMatrix cz_block_formula(int d, int m, int u);
/// E_m(m) (E_l(u) (x) E_l(d)) CZ (E_r(u) (x) E_r(d)) E_m(m) in upper-first order.
CMatrix cz_block_reference(int d, int m, int u);

/// cz_block(d,m,u) = s * phase * (top (x) bottom) * CZ with s > 0.
struct CzByproduct {
    Pauli top;
    Pauli bottom;
    cplx phase;
    double scale;
};
CzByproduct cz_byproduct(int d, int m, int u);

const CMatrix& cz();

/// Edge-removal basis vector and the realized vertical operator |beta><alpha|.
struct EdgeRemoval {
    CVector vector;
    CMatrix op;
    bool flip_upper;  // alpha = -
    bool flip_lower;  // beta = -
};
EdgeRemoval edge_removal_basis(int outcome);
const MeasurementBasis& edge_removal_measurement();

/// Horizontal lists of the (upper, lower) circles after the edge-removal outcome.
struct EdgeRemovalRule {
    MatrixList upper;
    MatrixList lower;
};
EdgeRemovalRule edge_removal_byproduct(int outcome);

/// R with rows <L(i)| = <0|A(i) for the left boundary <0|, alpha = 1.
const ReadoutMap& readout_map();
/// Level -> readout bit: levels 0,3 give 0 and levels 1,2 give 1.
int readout_bit(int level);
/// Pi_0 = |0><0| + |3><3|, Pi_1 = |1><1| + |2><2|
CMatrix readout_projector(int bit);

/// All model constants as JSON text, complex entries as [re, im], row-major.
std::string dump_constants();

}  // namespace pepsmqc::honeycomb

#pragma once

// Correlation-space machinery for MPS/PEPS resource states: amplitudes,
// measurement-induced operators, readout and the vertical two-site contraction.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pepsmqc/numerics.hpp"

namespace pepsmqc {

/// d matrices of size D x D, one per physical level.
class MatrixList {
  public:
    MatrixList() = default;
    explicit MatrixList(std::vector<CMatrix> entries);

    std::size_t arity() const { return entries_.size(); }
    Eigen::Index dim() const { return entries_.empty() ? 0 : entries_.front().rows(); }
    const CMatrix& operator[](std::size_t i) const { return entries_.at(i); }
    const std::vector<CMatrix>& entries() const { return entries_; }

    /// Tr[A(i)^dagger A(j)] = delta_ij within tol.
    bool is_orthonormal(double tol = 1e-12) const;

    /// Entry-wise X A X style conjugation: out(i) = left * A(i) * right.
    MatrixList sandwiched(const CMatrix& left, const CMatrix& right) const;

  private:
    std::vector<CMatrix> entries_;
};

struct BoundaryPair {
    CVector left;   // components of <L| as a row, stored as a column
    CVector right;  // |R>

    BoundaryPair(CVector l, CVector r);
};

/// d orthonormal vectors of dimension d; outcome k is vector k.
class MeasurementBasis {
  public:
    MeasurementBasis() = default;
    explicit MeasurementBasis(std::vector<CVector> vectors, double tol = 1e-12);

    std::size_t size() const { return vectors_.size(); }
    const CVector& operator[](std::size_t k) const { return vectors_.at(k); }
    const std::vector<CVector>& vectors() const { return vectors_; }

    CMatrix gram() const;

    /// Throws InputError if some A[phi(k)] is singular (condition number >= max_condition).
    void check_invertible_on(const MatrixList& list, double max_condition = 1e8) const;

  private:
    std::vector<CVector> vectors_;
};

/// Circle-site tensor: slices[k][b] is the D x D horizontal matrix paired with
/// vertical basis ket |b>, so T(k) = sum_b |b> (x) slices[k][b].
class SiteTensor {
  public:
    SiteTensor() = default;
    explicit SiteTensor(std::vector<std::vector<CMatrix>> slices);

    std::size_t arity() const { return slices_.size(); }
    std::size_t vertical_dim() const { return slices_.empty() ? 0 : slices_.front().size(); }
    Eigen::Index dim() const;
    const CMatrix& slice(std::size_t level, std::size_t b) const { return slices_.at(level).at(b); }

    /// Closes the vertical leg with <v| (components v_b, no conjugation):
    /// out(k) = sum_b v_b slices[k][b].
    MatrixList close_vertical(const CVector& v) const;

    /// Applies `fn` to every horizontal matrix.
    template <class Fn>
    SiteTensor map_horizontal(Fn&& fn) const {
        auto copy = slices_;
        for (auto& level : copy) {
            for (auto& m : level) {
                m = fn(m);
            }
        }
        return SiteTensor(std::move(copy));
    }

  private:
    std::vector<std::vector<CMatrix>> slices_;
};

/// Physical readout map; the amplitude of level i is alpha * row i of R applied to |Phi>.
class ReadoutMap {
  public:
    ReadoutMap(CMatrix r, double alpha);

    const CMatrix& matrix() const { return r_; }
    double alpha() const { return alpha_; }

  private:
    CMatrix r_;
    double alpha_;
};

/// <L| A_N(i_N) ... A_1(i_1) |R>. lists[0] is site 1, the one next to |R>.
cplx mps_amplitude(std::span<const MatrixList> lists, const BoundaryPair& boundary,
                   std::span<const int> levels);

/// A[phi] = sum_i conj(phi_i) A(i).
CMatrix project_site(const MatrixList& list, const CVector& state);

/// ops in measurement order; returns ops.back() * ... * ops.front(). Empty gives I_dim.
CMatrix gate_product(std::span<const CMatrix> ops, Eigen::Index dim = 2);

/// E with actual = E * intended.
CMatrix byproduct_of(const CMatrix& actual, const CMatrix& intended);

/// alpha * R * frame * state, normalized to unit length.
CVector readout_apply(const ReadoutMap& map, const CMatrix& frame, const CVector& state);

/// Two circle tensors coupled by a vertical bond. `bond` has rows indexed by the
/// lower site's vertical leg and columns by the upper's. Returns
///   sum_{a,b} bond(a,b) U_b (x) L_a
/// with U_b = sum_k conj(up_k) upper.slice(k,b) (upper = first factor) and
/// L_a likewise for the lower site.
CMatrix vertical_contract(const SiteTensor& upper, const SiteTensor& lower, const CVector& up_state,
                          const CVector& down_state, const CMatrix& bond);

struct LocalPair {
    CMatrix g;  // carries the phase and scale
    CMatrix h;  // det h = 1
};

/// If W (E (x) F) W^dagger is a product operator G (x) H, return it.
std::optional<LocalPair> locality_condition(const CMatrix& w, const CMatrix& e, const CMatrix& f,
                                            double tol = 1e-10);

/// Coefficients c_i = Tr[basis(i)^dagger m] / Tr[basis(i)^dagger basis(i)].
CVector hs_coefficients(const MatrixList& basis, const CMatrix& m);

}  // namespace pepsmqc

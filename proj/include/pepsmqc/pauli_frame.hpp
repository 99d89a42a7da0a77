#pragma once

// Pauli labels with exact quarter-turn phases, and the per-wire frame used to
// track measurement by-products.

#include <array>
#include <string>
#include <vector>

#include "pepsmqc/numerics.hpp"

namespace pepsmqc {

/// Index into Sigma = (I, X, Y, Z).
enum class Pauli : int { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);
const CMatrix& pauli_matrix(Pauli p);

/// phase * sigma(label)
struct PhasedPauli {
    Pauli label = Pauli::I;
    cplx phase{1.0, 0.0};

    CMatrix matrix() const;
};

/// sigma(a) sigma(b) = phase * sigma(label)
PhasedPauli pauli_product(Pauli a, Pauli b);
PhasedPauli operator*(const PhasedPauli& a, const PhasedPauli& b);

/// Identify m as c * sigma(label) with |c| > 0; throws InputError if m is not
/// proportional to a Pauli within tol (relative). The returned phase is c/|c|.
PhasedPauli identify_pauli(const CMatrix& m, double tol = 1e-10);

/// CZ (a (x) b) CZ = phase * (first (x) second).
struct CzPush {
    Pauli first;
    Pauli second;
    cplx phase;
};
CzPush push_through_cz(Pauli a, Pauli b);

class PauliFrame {
  public:
    PauliFrame() = default;
    explicit PauliFrame(int wires);
    PauliFrame(std::vector<Pauli> labels, cplx phase);

    int wires() const { return static_cast<int>(labels_.size()); }
    Pauli label(int wire) const { return labels_.at(static_cast<std::size_t>(wire)); }
    const std::vector<Pauli>& labels() const { return labels_; }
    cplx phase() const { return phase_; }

    /// Left-multiplies wire `wire` by p: E <- p_wire * E.
    void apply(int wire, const PhasedPauli& p);
    /// Replaces the label on `wire`, multiplying the global phase by `factor`.
    void reset(int wire, Pauli label, cplx factor);
    void multiply_phase(cplx factor) { phase_ *= factor; }
    /// E <- CZ_{a,b} E CZ_{a,b}
    void push_cz(int a, int b);

    /// True if the wire's label flips a computational-basis readout (X or Y).
    bool flips(int wire) const;
    /// Bit mask of flipped wires, wire 0 as the most significant bit.
    unsigned flip_mask() const;

    /// phase * (x)_w sigma(label_w)
    CMatrix matrix() const;
    std::string to_string() const;

    bool operator==(const PauliFrame& other) const = default;

  private:
    std::vector<Pauli> labels_;
    cplx phase_{1.0, 0.0};
};

}  // namespace pepsmqc

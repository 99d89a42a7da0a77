#pragma once

// Local unitaries u with W u W^dagger local, for the canonical two-qubit gate
//   W = exp(i/2 (alpha XX + beta YY + gamma ZZ)).
// Work happens in the magic basis, where SU(2)(x)SU(2) becomes SO(4) and W is
// diagonal; the admissible SO(4) supports follow from a phase filter.

#include <json.hpp>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pepsmqc/numerics.hpp"
#include "pepsmqc/pauli_frame.hpp"

namespace pepsmqc::crossing {

struct CanonicalGate {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    /// Throws InputError unless every parameter lies in [0, pi).
    void validate() const;
    CMatrix matrix() const;
    /// Exponents of D = Q^dagger W Q times two, one per magic-basis vector.
    std::array<double, 4> phases() const;
};

const CMatrix& magic_basis();
/// Q^dagger k Q; throws InputError for a non-unitary k.
CMatrix magic_transform(const CMatrix& k);

struct PhaseClass {
    double eta = 0.0;  // in [0, pi)
    Eigen::Matrix4i support;
};

struct PhaseFilter {
    CMatrix f;  // F_ij = exp(i (phase_i - phase_j))
    std::vector<PhaseClass> classes;  // ascending eta; supports partition all 16 entries
    bool near_merge = false;          // entries merged within tolerance but not exactly equal
};

PhaseFilter filter_matrix(const CanonicalGate& g, double tol = 1e-9);

using Plane = std::pair<int, int>;  // 0-based magic-basis axes, first < second

std::string plane_name(const Plane& p);
/// Q R(theta) Q^dagger for the rotation by theta in the given plane.
CMatrix plane_local_gate(const Plane& p, double theta);

/// Coset of the phase-zero group: rotations in `planes` (any angles) times a
/// diagonal even reflection, times the fixed signed permutation `coset`.
struct LocalFamily {
    double eta = 0.0;
    std::vector<Plane> planes;
    Eigen::Matrix4d coset = Eigen::Matrix4d::Identity();
    std::string coset_label;  // e.g. "Y⊗Z"; empty for the identity coset
    std::string template_text;

    CMatrix sample(std::mt19937_64& rng) const;
    bool contains(const CMatrix& u, double tol = 1e-9) const;
};

struct CrossingSolution {
    PhaseFilter filter;
    std::vector<LocalFamily> families;
    std::vector<double> unsolved;        // eta values with no admissible SO(4) support
    std::vector<std::string> templates;  // families merged into closed forms where possible

    bool contains(const CMatrix& u, double tol = 1e-9) const;
};

CrossingSolution solve_patterns(const PhaseFilter& filter);

struct VerificationReport {
    std::size_t passed = 0;
    std::size_t failed = 0;
};

/// Draws members of `family` and checks that W u W^dagger has Schmidt rank one
/// with unitary factors.
VerificationReport verify_family(const CanonicalGate& g, const LocalFamily& family, std::size_t samples,
                                 std::uint64_t seed);

/// True when W u W^dagger is a product of unitaries.
bool crosses_locally(const CanonicalGate& g, const CMatrix& u, double tol = 1e-10);

nlohmann::json solution_to_json(const CrossingSolution& s);

}  // namespace pepsmqc::crossing

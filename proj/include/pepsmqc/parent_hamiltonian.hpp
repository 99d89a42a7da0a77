#pragma once

// Three-site parent Hamiltonian of the honeycomb resource state. Terms are read
// from a Pauli shorthand: "0122(-1)+3200(2)" is -I(x)X(x)Y(x)Y + 2 Z(x)Y(x)I(x)I,
// two digits per site, first digit the more significant qubit of the site.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pepsmqc/correlation.hpp"
#include "pepsmqc/numerics.hpp"

namespace pepsmqc::hamiltonian {

struct ShorthandTerm {
    std::string digits;
    long coefficient = 0;
};

/// Whitespace is ignored. Throws InputError on malformed input.
std::vector<ShorthandTerm> parse_shorthand(std::string_view text);

/// Sum of coefficient * Pauli string; all strings must share one length.
CMatrix build_term(const std::vector<ShorthandTerm>& terms);

/// Listings compiled into the library, keyed by file stem (h_lr, h_lum, ...).
const std::vector<std::pair<std::string, std::string>>& embedded_listings();
/// Reads h_lr, h_lum, h_ldm, h_mur, h_mdr and h_umd from `dir`; throws InputError if one is missing.
std::map<std::string, std::string> load_listings(const std::filesystem::path& dir);
std::map<std::string, std::string> default_listings();

/// Site triples per listing, in the order the listing's digits address them.
enum class Geometry { lr, lum, ldm, mur, mdr, umd };
Geometry geometry_of(const std::string& listing);

/// Orthonormal basis (64 x rank) of the physical vectors a three-site patch
/// produces over all of its open virtual indices.
CMatrix patch_support(Geometry g, const MatrixList& square, const SiteTensor& circle);
CMatrix patch_support(Geometry g);

enum class RegionKind { circle_right_square, vertical_mid_square };

struct RegionSupport {
    RegionKind kind;
    CMatrix basis;  // orthonormal columns
    int rank = 0;
};

RegionSupport region_support(RegionKind kind, const MatrixList& square, const SiteTensor& circle);
RegionSupport region_support(RegionKind kind);

struct LocalTerm {
    std::string name;     // h_lr_u, h_lr_d, h_lum, h_ldm, h_mur, h_mdr, h_umd
    std::string listing;  // source listing
    std::array<int, 3> sites{};  // unit7 site ids
    CMatrix matrix;       // 64 x 64
};

/// Unit7 sites: 0 l_u, 1 u, 2 r_u, 3 m, 4 l_d, 5 d, 6 r_d.
const std::array<std::string, 7>& unit7_site_names();
std::vector<LocalTerm> unit7_terms(const std::map<std::string, std::string>& listings);

struct TermReport {
    std::string name;
    bool hermitian = false;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    double annihilation = 0.0;  // max |h v| / |h| over the support basis
    int kernel_dim = 0;
    int support_rank = 0;
    bool psd = false;
    bool annihilates = false;

    bool passed() const { return hermitian && psd && annihilates; }
};

TermReport verify_term(const LocalTerm& term, const CMatrix& support);

struct PatchOptions {
    CVector left;   // open left virtual legs; default <0|
    CVector right;  // open right virtual legs; default |0>
    std::size_t eigenvalues = 20;
    SpectrumOptions spectrum;
};

struct SpectrumReport {
    std::size_t dimension = 0;
    std::size_t nonzeros = 0;
    std::vector<double> eigenvalues;  // ascending
    int degeneracy = 0;               // eigenvalues within 1e-6 of the lowest
    std::optional<double> gap;        // first level above the ground space, if resolved
    double peps_residual = 0.0;       // |H psi| for the normalized patch state
    double ground_overlap = 0.0;      // norm of the patch state's projection onto the ground space
    std::size_t matvecs = 0;
};

SparseMatrix assemble_unit7(const std::vector<LocalTerm>& terms);
CVector unit7_peps_state(const CVector& left, const CVector& right);
SpectrumReport assemble_and_diagonalize(const std::vector<LocalTerm>& terms, const PatchOptions& options = {});

}  // namespace pepsmqc::hamiltonian

#include "pepsmqc/parent_hamiltonian.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "pepsmqc/errors.hpp"
#include "pepsmqc/honeycomb.hpp"
#include "pepsmqc/oracle.hpp"

namespace pepsmqc::hamiltonian {

namespace hc = honeycomb;

std::vector<ShorthandTerm> parse_shorthand(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s.push_back(c);
        }
    }
    if (s.empty()) {
        throw InputError("shorthand: empty listing");
    }
    std::vector<ShorthandTerm> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (!out.empty()) {
            if (s[pos] != '+') {
                throw InputError("shorthand: expected '+' at offset " + std::to_string(pos));
            }
            ++pos;
        }
        ShorthandTerm term;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            if (s[pos] > '3') {
                throw InputError("shorthand: digit " + std::string(1, s[pos]) + " out of range 0..3");
            }
            term.digits.push_back(s[pos++]);
        }
        if (term.digits.empty() || term.digits.size() % 2 != 0) {
            throw InputError("shorthand: term '" + term.digits + "' must have an even, nonzero digit count");
        }
        if (pos >= s.size() || s[pos] != '(') {
            throw InputError("shorthand: missing '(' after '" + term.digits + "'");
        }
        const auto close = s.find(')', pos);
        if (close == std::string::npos) {
            throw InputError("shorthand: unterminated coefficient after '" + term.digits + "'");
        }
        const std::string coef = s.substr(pos + 1, close - pos - 1);
        std::size_t used = 0;
        try {
            term.coefficient = std::stol(coef, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (coef.empty() || used != coef.size()) {
            throw InputError("shorthand: bad coefficient '" + coef + "'");
        }
        if (term.coefficient == 0) {
            throw InputError("shorthand: zero coefficient on '" + term.digits + "'");
        }
        pos = close + 1;
        out.push_back(std::move(term));
    }
    return out;
}

CMatrix build_term(const std::vector<ShorthandTerm>& terms) {
    if (terms.empty()) {
        throw InputError("build_term: no terms");
    }
    const std::size_t len = terms.front().digits.size();
    const Eigen::Index dim = Eigen::Index{1} << len;
    CMatrix h = CMatrix::Zero(dim, dim);
    for (const auto& t : terms) {
        if (t.digits.size() != len) {
            throw InputError("build_term: inconsistent Pauli string lengths");
        }
        std::vector<CMatrix> factors;
        for (char d : t.digits) {
            factors.push_back(pauli::sigma()[static_cast<std::size_t>(d - '0')]);
        }
        h += static_cast<double>(t.coefficient) * kron_all(factors);
    }
    if (!is_hermitian(h, 1e-12)) {
        throw InputError("build_term: result is not Hermitian");
    }
    return h;
}

namespace {

const std::array<std::string, 6>& listing_names() {
    static const std::array<std::string, 6> names = {"h_lr", "h_lum", "h_ldm", "h_mur", "h_mdr", "h_umd"};
    return names;
}

// Orthonormal basis of the column span.
CMatrix span_of(const CMatrix& vectors) {
    if (vectors.cols() == 0) {
        return CMatrix(vectors.rows(), 0);
    }
    const Eigen::JacobiSVD<CMatrix> svd(vectors, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    const double cut = 1e-10 * std::max(1.0, s(0));
    while (rank < s.size() && s(rank) > cut) {
        ++rank;
    }
    return svd.matrixU().leftCols(rank);
}

Eigen::Index idx3(int p, int q, int r) { return (p * 4 + q) * 4 + r; }

}  // namespace

std::map<std::string, std::string> load_listings(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& name : listing_names()) {
        const auto path = dir / (name + ".txt");
        std::ifstream in(path);
        if (!in) {
            throw InputError("missing listing " + path.string());
        }
        std::stringstream buf;
        buf << in.rdbuf();
        out[name] = buf.str();
    }
    return out;
}

std::map<std::string, std::string> default_listings() {
    std::map<std::string, std::string> out(embedded_listings().begin(), embedded_listings().end());
    for (const auto& name : listing_names()) {
        if (!out.count(name)) {
            throw InputError("embedded listing " + name + " is missing");
        }
    }
    return out;
}

Geometry geometry_of(const std::string& listing) {
    static const std::map<std::string, Geometry> table = {{"h_lr", Geometry::lr},   {"h_lum", Geometry::lum},
                                                          {"h_ldm", Geometry::ldm}, {"h_mur", Geometry::mur},
                                                          {"h_mdr", Geometry::mdr}, {"h_umd", Geometry::umd}};
    const auto it = table.find(listing);
    if (it == table.end()) {
        throw InputError("unknown listing '" + listing + "'");
    }
    return it->second;
}

CMatrix patch_support(Geometry g, const MatrixList& A, const SiteTensor& T) {
    auto t = [&](int q, int v) -> const CMatrix& {
        return T.slice(static_cast<std::size_t>(q), static_cast<std::size_t>(v));
    };
    auto a = [&](int p) -> const CMatrix& { return A[static_cast<std::size_t>(p)]; };
    std::vector<CVector> columns;
    auto emit = [&](auto&& amplitude) {
        CVector v(64);
        for (int p = 0; p < 4; ++p) {
            for (int q = 0; q < 4; ++q) {
                for (int r = 0; r < 4; ++r) {
                    v(idx3(p, q, r)) = amplitude(p, q, r);
                }
            }
        }
        columns.push_back(v);
    };
    switch (g) {
        case Geometry::lr:  // l square, circle, r square; open: left, vertical, right
            for (int al = 0; al < 2; ++al)
                for (int v = 0; v < 2; ++v)
                    for (int e = 0; e < 2; ++e)
                        emit([&](int p, int q, int r) { return (a(p) * t(q, v) * a(r))(al, e); });
            break;
        case Geometry::lum:  // mid's upper leg on the circle
        case Geometry::ldm:  // mid's lower leg on the circle
            for (int al = 0; al < 2; ++al)
                for (int c = 0; c < 2; ++c)
                    for (int w = 0; w < 2; ++w)
                        emit([&](int p, int q, int r) {
                            cplx s = 0.0;
                            for (int v = 0; v < 2; ++v) {
                                const cplx bond = g == Geometry::lum ? a(r)(w, v) : a(r)(v, w);
                                s += (a(p) * t(q, v))(al, c) * bond;
                            }
                            return s;
                        });
            break;
        case Geometry::mur:
        case Geometry::mdr:
            for (int w = 0; w < 2; ++w)
                for (int b = 0; b < 2; ++b)
                    for (int e = 0; e < 2; ++e)
                        emit([&](int p, int q, int r) {
                            cplx s = 0.0;
                            for (int v = 0; v < 2; ++v) {
                                const cplx bond = g == Geometry::mur ? a(p)(w, v) : a(p)(v, w);
                                s += bond * (t(q, v) * a(r))(b, e);
                            }
                            return s;
                        });
            break;
        case Geometry::umd:  // upper circle, mid, lower circle; open: four horizontal legs
            for (int x = 0; x < 16; ++x) {
                const int al = x >> 3, b = (x >> 2) & 1, c = (x >> 1) & 1, d = x & 1;
                emit([&](int p, int q, int r) {
                    cplx s = 0.0;
                    for (int v = 0; v < 2; ++v) {
                        for (int w = 0; w < 2; ++w) {
                            s += t(p, v)(al, b) * a(q)(w, v) * t(r, w)(c, d);
                        }
                    }
                    return s;
                });
            }
            break;
    }
    CMatrix m(64, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
        m.col(static_cast<Eigen::Index>(i)) = columns[i];
    }
    return span_of(m);
}

CMatrix patch_support(Geometry g) { return patch_support(g, hc::square_list(), hc::circle_tensor()); }

RegionSupport region_support(RegionKind kind, const MatrixList& A, const SiteTensor& T) {
    CMatrix vectors;
    if (kind == RegionKind::circle_right_square) {
        vectors = CMatrix(16, 8);
        for (int x = 0; x < 8; ++x) {
            const int v = x >> 2, b = (x >> 1) & 1, e = x & 1;
            for (int q = 0; q < 4; ++q) {
                for (int r = 0; r < 4; ++r) {
                    vectors(q * 4 + r, x) =
                        (T.slice(static_cast<std::size_t>(q), static_cast<std::size_t>(v)) * A[static_cast<std::size_t>(r)])(b, e);
                }
            }
        }
    } else {
        vectors = CMatrix(4, 4);
        for (int x = 0; x < 4; ++x) {
            for (int p = 0; p < 4; ++p) {
                vectors(p, x) = A[static_cast<std::size_t>(p)](x >> 1, x & 1);
            }
        }
    }
    RegionSupport r{kind, span_of(vectors), 0};
    r.rank = static_cast<int>(r.basis.cols());
    return r;
}

RegionSupport region_support(RegionKind kind) { return region_support(kind, hc::square_list(), hc::circle_tensor()); }

const std::array<std::string, 7>& unit7_site_names() {
    static const std::array<std::string, 7> names = {"l_u", "u", "r_u", "m", "l_d", "d", "r_d"};
    return names;
}

std::vector<LocalTerm> unit7_terms(const std::map<std::string, std::string>& listings) {
    struct Placement {
        const char* name;
        const char* listing;
        std::array<int, 3> sites;
    };
    static const Placement placements[] = {
        {"h_lr_u", "h_lr", {0, 1, 2}}, {"h_lr_d", "h_lr", {4, 5, 6}}, {"h_lum", "h_lum", {0, 1, 3}},
        {"h_ldm", "h_ldm", {4, 5, 3}}, {"h_mur", "h_mur", {3, 1, 2}}, {"h_mdr", "h_mdr", {3, 5, 6}},
        {"h_umd", "h_umd", {1, 3, 5}},
    };
    std::map<std::string, CMatrix> built;
    std::vector<LocalTerm> out;
    for (const auto& p : placements) {
        const auto it = listings.find(p.listing);
        if (it == listings.end()) {
            throw InputError(std::string("missing listing ") + p.listing);
        }
        if (!built.count(p.listing)) {
            const CMatrix h = build_term(parse_shorthand(it->second));
            if (h.rows() != 64) {
                throw InputError(std::string("listing ") + p.listing + " must act on three sites");
            }
            built[p.listing] = h;
        }
        out.push_back({p.name, p.listing, p.sites, built[p.listing]});
    }
    return out;
}

TermReport verify_term(const LocalTerm& term, const CMatrix& support) {
    TermReport r;
    r.name = term.name;
    r.support_rank = static_cast<int>(support.cols());
    r.hermitian = is_hermitian(term.matrix, 1e-12);
    if (!r.hermitian) {
        return r;
    }
    const auto eig = hermitian_eig(term.matrix);
    r.min_eigenvalue = eig.values(0);
    r.max_eigenvalue = eig.values(eig.values.size() - 1);
    const double scale = std::max(std::abs(r.min_eigenvalue), std::abs(r.max_eigenvalue));
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (std::abs(eig.values(i)) <= 1e-9 * std::max(1.0, scale)) {
            ++r.kernel_dim;
        }
    }
    r.psd = r.min_eigenvalue >= -1e-9;
    for (Eigen::Index c = 0; c < support.cols(); ++c) {
        r.annihilation = std::max(r.annihilation, (term.matrix * support.col(c)).norm() / std::max(scale, 1e-300));
    }
    r.annihilates = r.annihilation <= 1e-8;
    return r;
}

SparseMatrix assemble_unit7(const std::vector<LocalTerm>& terms) {
    constexpr int sites = 7;
    constexpr int dim = 1 << (2 * sites);
    auto weight = [](int site) { return 1 << (2 * (sites - 1 - site)); };

    struct Sparse3 {
        std::array<int, 3> w;
        std::vector<std::vector<std::pair<int, cplx>>> rows;  // local row -> (local col, value)
    };
    std::vector<Sparse3> local;
    for (const auto& t : terms) {
        if (t.matrix.rows() != 64 || t.matrix.cols() != 64) {
            throw InputError("assemble_unit7: term " + t.name + " is not a three-site operator");
        }
        Sparse3 s;
        for (int k = 0; k < 3; ++k) {
            if (t.sites[static_cast<std::size_t>(k)] < 0 || t.sites[static_cast<std::size_t>(k)] >= sites) {
                throw InputError("assemble_unit7: term " + t.name + " addresses a site outside the unit");
            }
            s.w[static_cast<std::size_t>(k)] = weight(t.sites[static_cast<std::size_t>(k)]);
        }
        s.rows.resize(64);
        for (int i = 0; i < 64; ++i) {
            for (int j = 0; j < 64; ++j) {
                if (std::abs(t.matrix(i, j)) > 1e-14) {
                    s.rows[static_cast<std::size_t>(i)].emplace_back(j, t.matrix(i, j));
                }
            }
        }
        local.push_back(std::move(s));
    }

    std::vector<int> outer{0};
    std::vector<int> inner;
    std::vector<cplx> values;
    std::vector<std::pair<int, cplx>> row;
    for (int r = 0; r < dim; ++r) {
        row.clear();
        for (const auto& s : local) {
            int rest = r;
            int l = 0;
            for (int k = 0; k < 3; ++k) {
                const int digit = (r / s.w[static_cast<std::size_t>(k)]) & 3;
                l = l * 4 + digit;
                rest -= digit * s.w[static_cast<std::size_t>(k)];
            }
            for (const auto& [c, v] : s.rows[static_cast<std::size_t>(l)]) {
                const int col = rest + (c >> 4) * s.w[0] + ((c >> 2) & 3) * s.w[1] + (c & 3) * s.w[2];
                row.emplace_back(col, v);
            }
        }
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < row.size();) {
            cplx sum = 0.0;
            const int col = row[i].first;
            for (; i < row.size() && row[i].first == col; ++i) {
                sum += row[i].second;
            }
            if (std::abs(sum) > 1e-14) {
                inner.push_back(col);
                values.push_back(sum);
            }
        }
        outer.push_back(static_cast<int>(inner.size()));
    }
    const Eigen::Map<const SparseMatrix> mapped(dim, dim, static_cast<Eigen::Index>(values.size()), outer.data(),
                                                inner.data(), values.data());
    return SparseMatrix(mapped);
}

CVector unit7_peps_state(const CVector& left, const CVector& right) {
    oracle::PatchLayout layout;
    layout.left = left;
    layout.right = {right, right};
    layout.sites = {{SiteRole::square_horizontal, 0, 0, -1}, {SiteRole::circle, 0, 0, 0},
                    {SiteRole::square_horizontal, 0, 1, -1}, {SiteRole::square_vertical_mid, 0, 0, -1},
                    {SiteRole::square_horizontal, 1, 0, -1}, {SiteRole::circle, 1, 0, 1},
                    {SiteRole::square_horizontal, 1, 1, -1}};
    // Chains start next to the right boundary.
    layout.chains = {{2, 1, 0}, {6, 5, 4}};
    layout.bonds = {{3, 0, 1}};
    layout.legs = 2;
    return oracle::build_patch(layout, 7).amplitudes;
}

SpectrumReport assemble_and_diagonalize(const std::vector<LocalTerm>& terms, const PatchOptions& options) {
    if (terms.empty()) {
        throw InputError("assemble_and_diagonalize: no terms fit the patch");
    }
    const SparseMatrix h = assemble_unit7(terms);
    SpectrumReport r;
    r.dimension = static_cast<std::size_t>(h.rows());
    r.nonzeros = static_cast<std::size_t>(h.nonZeros());

    CVector zero = CVector::Zero(2);
    zero(0) = 1.0;
    const CVector psi = unit7_peps_state(options.left.size() ? options.left : zero,
                                         options.right.size() ? options.right : zero);
    r.peps_residual = (h * psi).norm();

    SpectrumOptions so = options.spectrum;
    if (so.block_size == 0) {
        so.block_size = options.eigenvalues + 4;
    }
    const auto spec = sparse_low_spectrum(as_operator(h), options.eigenvalues, so);
    r.eigenvalues = spec.values;
    r.matvecs = spec.matvecs;
    const double lowest = spec.values.front();
    for (double v : spec.values) {
        if (v - lowest <= 1e-6) {
            ++r.degeneracy;
        } else if (!r.gap) {
            r.gap = v - lowest;
        }
    }
    const CMatrix ground = spec.vectors.leftCols(r.degeneracy);
    r.ground_overlap = (ground.adjoint() * psi).norm();
    return r;
}

}  // namespace pepsmqc::hamiltonian

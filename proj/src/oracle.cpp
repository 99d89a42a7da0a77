#include "pepsmqc/oracle.hpp"

#include <algorithm>
#include <map>

#include "pepsmqc/errors.hpp"
#include "pepsmqc/honeycomb.hpp"
#include "pepsmqc/simd/kernels.hpp"

namespace pepsmqc::oracle {

namespace hc = honeycomb;

namespace {

std::size_t pow4(std::size_t n) { return std::size_t{1} << (2 * n); }

CVector basis_ket(int k) {
    CVector v = CVector::Zero(2);
    v(k) = 1.0;
    return v;
}

// Horizontal matrix of a chain site at `level`; `legs` holds the value of every vertical leg.
const CMatrix& chain_matrix(const LayoutSite& s, int level, const std::vector<int>& legs) {
    static const MatrixList closed = hc::circle_tensor().close_vertical(CVector::Constant(2, 1.0 / std::sqrt(2.0)));
    if (s.role != SiteRole::circle) {
        return hc::square_list()[static_cast<std::size_t>(level)];
    }
    if (s.leg < 0) {
        return closed[static_cast<std::size_t>(level)];
    }
    return hc::circle_tensor().slice(static_cast<std::size_t>(level),
                                     static_cast<std::size_t>(legs[static_cast<std::size_t>(s.leg)]));
}

// Amplitudes of one chain, first chain site most significant.
CVector chain_vector(const PatchLayout& layout, const std::vector<int>& chain, const CVector& right,
                     const std::vector<int>& legs) {
    CMatrix states = right;  // one column per level prefix
    for (int id : chain) {
        const LayoutSite& s = layout.sites[static_cast<std::size_t>(id)];
        CMatrix next(2, states.cols() * 4);
        for (Eigen::Index col = 0; col < states.cols(); ++col) {
            for (int i = 0; i < 4; ++i) {
                next.col(col * 4 + i) = chain_matrix(s, i, legs) * states.col(col);
            }
        }
        states = std::move(next);
    }
    return (layout.left.transpose() * states).transpose();
}

}  // namespace

PatchLayout row_layout(int squares, const CVector& left, const CVector& right) {
    PatchLayout layout;
    layout.left = left;
    layout.right = {right};
    layout.chains.emplace_back();
    for (int i = 0; i < squares; ++i) {
        layout.sites.push_back({SiteRole::square_horizontal, 0, i, -1});
        layout.chains[0].push_back(i);
    }
    return layout;
}

PatchLayout layout_of(const MeasurementPattern& pattern) {
    PatchLayout layout;
    const int n = pattern.wires();
    layout.left = basis_ket(0);
    layout.chains.resize(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        layout.right.push_back(pattern.circuit.input_vector(w));
    }
    std::map<std::pair<int, int>, int> circle_at;  // (wire, column) -> site
    for (std::size_t i = 0; i < pattern.sites.size(); ++i) {
        const PatternSite& p = pattern.sites[i];
        layout.sites.push_back({p.role, p.wire, p.column, -1});
        if (p.role != SiteRole::square_vertical_mid) {
            layout.chains[static_cast<std::size_t>(p.wire)].push_back(static_cast<int>(i));
        }
        if (p.role == SiteRole::circle) {
            circle_at[{p.wire, p.column}] = static_cast<int>(i);
        }
    }
    auto rank = [](SiteRole r) { return r == SiteRole::square_horizontal ? 0 : r == SiteRole::circle ? 1 : 2; };
    for (auto& chain : layout.chains) {
        std::stable_sort(chain.begin(), chain.end(), [&](int a, int b) {
            const auto& sa = layout.sites[static_cast<std::size_t>(a)];
            const auto& sb = layout.sites[static_cast<std::size_t>(b)];
            return std::pair(sa.column, rank(sa.role)) < std::pair(sb.column, rank(sb.role));
        });
    }
    for (std::size_t i = 0; i < pattern.sites.size(); ++i) {
        const PatternSite& p = pattern.sites[i];
        if (p.role != SiteRole::square_vertical_mid) {
            continue;
        }
        const auto up = circle_at.find({p.wire, p.column});
        const auto down = circle_at.find({p.wire + 1, p.column});
        if (up == circle_at.end() || down == circle_at.end()) {
            throw InputError("layout_of: mid square without circles on both wires");
        }
        layout.sites[static_cast<std::size_t>(up->second)].leg = layout.legs++;
        layout.sites[static_cast<std::size_t>(down->second)].leg = layout.legs++;
        layout.bonds.push_back({static_cast<int>(i), layout.sites[static_cast<std::size_t>(up->second)].leg,
                                layout.sites[static_cast<std::size_t>(down->second)].leg});
    }
    return layout;
}

PatchState build_patch(const PatchLayout& layout, int max_sites) {
    const std::size_t n = layout.sites.size();
    if (n == 0) {
        throw InputError("build_patch: empty layout");
    }
    if (n > static_cast<std::size_t>(max_sites)) {
        throw ResourceCapError("build_patch: " + std::to_string(n) + " sites exceed the cap of " +
                               std::to_string(max_sites));
    }
    if (layout.right.size() != layout.chains.size() || layout.left.size() != 2) {
        throw InputError("build_patch: boundary vectors do not match the chains");
    }

    // Kron order: chains in wire order, then mid squares.
    std::vector<int> order;
    for (const auto& chain : layout.chains) {
        order.insert(order.end(), chain.begin(), chain.end());
    }
    for (const auto& bond : layout.bonds) {
        order.push_back(bond.site);
    }
    {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) {
            if (sorted[i] != static_cast<int>(i)) {
                throw InputError("build_patch: every site must appear exactly once");
            }
        }
    }

    const std::size_t dim = pow4(n);
    CVector kron_amps = CVector::Zero(static_cast<Eigen::Index>(dim));
    std::vector<int> legs(static_cast<std::size_t>(layout.legs), 0);
    for (std::size_t assignment = 0; assignment < (std::size_t{1} << layout.legs); ++assignment) {
        for (int l = 0; l < layout.legs; ++l) {
            legs[static_cast<std::size_t>(l)] = static_cast<int>((assignment >> l) & 1U);
        }
        CMatrix term = CMatrix::Ones(1, 1);
        for (std::size_t w = 0; w < layout.chains.size(); ++w) {
            term = kron(term, chain_vector(layout, layout.chains[w], layout.right[w], legs));
        }
        for (const auto& bond : layout.bonds) {
            CVector mid(4);
            for (int p = 0; p < 4; ++p) {
                mid(p) = hc::square_list()[static_cast<std::size_t>(p)](legs[static_cast<std::size_t>(bond.lower_leg)],
                                                                        legs[static_cast<std::size_t>(bond.upper_leg)]);
            }
            term = kron(term, mid);
        }
        kron_amps += term.col(0);
    }

    // Weight of each site in the global index.
    std::vector<std::size_t> weight(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        weight[static_cast<std::size_t>(order[pos])] = pow4(n - 1 - static_cast<std::size_t>(order[pos]));
    }
    PatchState state;
    state.amplitudes = CVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        std::size_t global = 0;
        std::size_t rest = k;
        for (std::size_t pos = n; pos-- > 0;) {
            global += (rest & 3U) * weight[static_cast<std::size_t>(order[pos])];
            rest >>= 2;
        }
        state.amplitudes(static_cast<Eigen::Index>(global)) = kron_amps(static_cast<Eigen::Index>(k));
    }
    const double norm = std::sqrt(simd::norm2({state.amplitudes.data(), dim}));
    if (norm == 0.0) {
        throw InputError("build_patch: boundaries give a zero-norm state");
    }
    state.amplitudes /= norm;
    for (std::size_t i = 0; i < n; ++i) {
        state.sites.push_back(static_cast<int>(i));
    }
    return state;
}

Measurement measure_site(const PatchState& state, int site, const CVector& vector) {
    const auto it = std::find(state.sites.begin(), state.sites.end(), site);
    if (it == state.sites.end()) {
        throw InputError("measure_site: site " + std::to_string(site) + " is not in the patch");
    }
    if (vector.size() != 4) {
        throw InputError("measure_site: measurement vector must have 4 components");
    }
    const auto pos = static_cast<std::size_t>(it - state.sites.begin());
    const std::size_t low = pow4(state.sites.size() - 1 - pos);
    const std::size_t high = pow4(pos);

    CVector out = CVector::Zero(static_cast<Eigen::Index>(high * low));
    for (std::size_t h = 0; h < high; ++h) {
        std::span<cplx> dst(out.data() + h * low, low);
        for (int i = 0; i < 4; ++i) {
            const cplx w = std::conj(vector(i));
            if (w != cplx{0.0}) {
                simd::axpy(w, std::span<const cplx>(state.amplitudes.data() + (h * 4 + static_cast<std::size_t>(i)) * low, low),
                           dst);
            }
        }
    }
    const double weight = simd::norm2({out.data(), high * low});
    const double norm = std::sqrt(weight);
    Measurement m;
    m.probability = weight;
    if (m.probability > 1e-24) {
        PatchState post;
        post.sites = state.sites;
        post.sites.erase(post.sites.begin() + static_cast<std::ptrdiff_t>(pos));
        post.amplitudes = out / norm;
        m.post = std::move(post);
    }
    return m;
}

namespace {

struct StateNode : MeasurementBackend::Node {
    explicit StateNode(PatchState s) : state(std::move(s)) {}
    PatchState state;
};

}  // namespace

PatternBackend::PatternBackend(const MeasurementPattern& pattern, int max_sites)
    : initial_(build_patch(layout_of(pattern), max_sites)) {}

std::shared_ptr<const MeasurementBackend::Node> PatternBackend::root() const {
    return std::make_shared<StateNode>(initial_);
}

std::pair<double, std::shared_ptr<const MeasurementBackend::Node>> PatternBackend::measure(
    const Node& node, int site, const CVector& vector) const {
    auto m = measure_site(static_cast<const StateNode&>(node).state, site, vector);
    if (!m.post) {
        return {m.probability, nullptr};
    }
    return {m.probability, std::make_shared<StateNode>(std::move(*m.post))};
}

std::vector<double> PatternBackend::readout_distribution(const Node& node) const {
    const PatchState& s = static_cast<const StateNode&>(node).state;
    const std::size_t n = s.sites.size();
    std::vector<double> dist(std::size_t{1} << n, 0.0);
    for (std::size_t k = 0; k < pow4(n); ++k) {
        std::size_t bits = 0;
        for (std::size_t pos = 0; pos < n; ++pos) {
            const int level = static_cast<int>((k >> (2 * (n - 1 - pos))) & 3U);
            bits = (bits << 1) | static_cast<std::size_t>(hc::readout_bit(level));
        }
        dist[bits] += std::norm(s.amplitudes(static_cast<Eigen::Index>(k)));
    }
    return dist;
}

CrossValidationReport cross_validate(const CircuitIR& circuit, const CrossValidationOptions& options) {
    CrossValidationReport report;
    report.pattern = compile(circuit);
    const PatternBackend backend(report.pattern, options.max_sites);
    for (std::size_t i = 0; i < report.pattern.sites.size(); ++i) {
        if (report.pattern.sites[i].role == SiteRole::readout_square &&
            i + static_cast<std::size_t>(report.pattern.wires()) < report.pattern.sites.size()) {
            throw InputError("cross_validate: readout squares must be the last sites");
        }
    }

    SimulationOptions sim;
    sim.backend = &backend;
    sim.threads = options.threads;
    sim.max_branches = options.max_branches;
    report.simulation = simulate_pattern(report.pattern, sim);

    const auto& reference = report.simulation.circuit_distribution;
    report.branches = report.simulation.branches.size();
    for (const auto& b : report.simulation.branches) {
        if (b.probability.value_or(0.0) <= 1e-12) {
            continue;
        }
        ++report.supported_branches;
        report.max_map_residual = std::max(report.max_map_residual, b.map_residual);
        for (std::size_t i = 0; i < reference.size(); ++i) {
            report.max_readout_error = std::max(report.max_readout_error, std::abs(b.readout[i] - reference[i]));
        }
    }
    for (std::size_t i = 0; i < reference.size(); ++i) {
        report.marginal_error =
            std::max(report.marginal_error, std::abs(report.simulation.marginal[i] - reference[i]));
    }
    report.probability_error = std::abs(report.simulation.total_probability - 1.0);
    report.passed = report.supported_branches > 0 && report.max_map_residual <= options.tolerance &&
                    report.max_readout_error <= options.tolerance && report.marginal_error <= options.tolerance &&
                    report.probability_error <= options.tolerance;
    return report;
}

nlohmann::json report_to_json(const CrossValidationReport& r) {
    nlohmann::json j;
    j["branches"] = r.branches;
    j["supported_branches"] = r.supported_branches;
    j["max_map_residual"] = r.max_map_residual;
    j["max_readout_error"] = r.max_readout_error;
    j["marginal_error"] = r.marginal_error;
    j["probability_error"] = r.probability_error;
    j["circuit_distribution"] = r.simulation.circuit_distribution;
    j["marginal"] = r.simulation.marginal;
    j["passed"] = r.passed;
    return j;
}

}  // namespace pepsmqc::oracle

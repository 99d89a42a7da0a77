#include "pepsmqc/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <thread>

#include "pepsmqc/errors.hpp"
#include "pepsmqc/honeycomb.hpp"
#include "pepsmqc/json_io.hpp"

namespace pepsmqc {

namespace hc = honeycomb;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Circuit IR

void CircuitIR::validate() const {
    if (wires <= 0) {
        throw InputError("circuit: wire count must be positive");
    }
    if (gates.empty()) {
        throw InputError("circuit: empty gate list");
    }
    if (!inputs.empty() && static_cast<int>(inputs.size()) != wires) {
        throw InputError("circuit: inputs must list one state per wire");
    }
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const Gate& g = gates[i];
        const std::string where = "circuit: gate " + std::to_string(i) + ": ";
        if (g.wire < 0 || g.wire >= wires) {
            throw InputError(where + "wire out of range");
        }
        if (g.column && *g.column < 0) {
            throw InputError(where + "negative column");
        }
        switch (g.kind) {
            case GateKind::su2:
                if (g.matrix.rows() != 2 || g.matrix.cols() != 2 || !is_unitary(g.matrix, 1e-10)) {
                    throw InputError(where + "matrix must be a 2x2 unitary");
                }
                break;
            case GateKind::cz:
                if (g.other < 0 || g.other >= wires) {
                    throw InputError(where + "wire out of range");
                }
                if (std::abs(g.other - g.wire) != 1) {
                    throw InputError(where + "CZ only acts on adjacent wires");
                }
                break;
            case GateKind::skip:
                break;
        }
    }
}

CMatrix CircuitIR::unitary() const {
    const Eigen::Index dim = Eigen::Index{1} << wires;
    CMatrix u = CMatrix::Identity(dim, dim);
    for (const Gate& g : gates) {
        if (g.kind == GateKind::su2) {
            u = embed_on_wires(g.matrix, g.wire, wires) * u;
        } else if (g.kind == GateKind::cz) {
            u = embed_on_wires(hc::cz(), std::min(g.wire, g.other), wires) * u;
        }
    }
    return u;
}

CVector CircuitIR::input_vector(int wire) const {
    CVector v = CVector::Zero(2);
    const InputState s = inputs.empty() ? InputState::zero : inputs.at(static_cast<std::size_t>(wire));
    if (s == InputState::zero) {
        v(0) = 1.0;
    } else {
        v(0) = v(1) = 1.0 / std::sqrt(2.0);
    }
    return v;
}

CVector CircuitIR::input_vector() const {
    CMatrix v = CMatrix::Identity(1, 1);
    for (int w = 0; w < wires; ++w) {
        v = kron(v, input_vector(w));
    }
    return v.col(0);
}

CircuitIR circuit_from_json(const json& j) {
    try {
        if (!j.is_object()) {
            throw InputError("circuit: expected a JSON object");
        }
        CircuitIR c;
        c.wires = j.at("wires").get<int>();
        if (j.contains("inputs")) {
            for (const auto& s : j.at("inputs")) {
                const auto name = s.get<std::string>();
                if (name == "0") {
                    c.inputs.push_back(InputState::zero);
                } else if (name == "+") {
                    c.inputs.push_back(InputState::plus);
                } else {
                    throw InputError("circuit: unknown input state '" + name + "'");
                }
            }
        }
        for (const auto& g : j.at("gates")) {
            Gate gate;
            const auto type = g.at("type").get<std::string>();
            if (type == "su2") {
                gate.kind = GateKind::su2;
                gate.wire = g.at("wire").get<int>();
                gate.matrix = json_io::matrix_from(g.at("matrix"), 2);
            } else if (type == "cz") {
                gate.kind = GateKind::cz;
                const auto& w = g.at("wires");
                if (!w.is_array() || w.size() != 2) {
                    throw InputError("circuit: cz needs exactly two wires");
                }
                gate.wire = w[0].get<int>();
                gate.other = w[1].get<int>();
            } else if (type == "skip") {
                gate.kind = GateKind::skip;
                gate.wire = g.at("wire").get<int>();
            } else {
                throw InputError("circuit: unknown gate type '" + type + "'");
            }
            if (g.contains("column")) {
                gate.column = g.at("column").get<int>();
            }
            c.gates.push_back(std::move(gate));
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw InputError(std::string("circuit: ") + e.what());
    }
}

json circuit_to_json(const CircuitIR& c) {
    json j;
    j["wires"] = c.wires;
    if (!c.inputs.empty()) {
        j["inputs"] = json::array();
        for (auto s : c.inputs) {
            j["inputs"].push_back(s == InputState::zero ? "0" : "+");
        }
    }
    j["gates"] = json::array();
    for (const Gate& g : c.gates) {
        json gj;
        switch (g.kind) {
            case GateKind::su2:
                gj["type"] = "su2";
                gj["wire"] = g.wire;
                gj["matrix"] = json_io::matrix_json(g.matrix);
                break;
            case GateKind::cz:
                gj["type"] = "cz";
                gj["wires"] = {g.wire, g.other};
                break;
            case GateKind::skip:
                gj["type"] = "skip";
                gj["wire"] = g.wire;
                break;
        }
        if (g.column) {
            gj["column"] = *g.column;
        }
        j["gates"].push_back(std::move(gj));
    }
    return j;
}

// ---------------------------------------------------------------------------
// Names

std::string role_name(SiteRole r) {
    switch (r) {
        case SiteRole::square_horizontal: return "square_horizontal";
        case SiteRole::square_vertical_mid: return "square_vertical_mid";
        case SiteRole::circle: return "circle";
        case SiteRole::readout_square: return "readout_square";
    }
    return "?";
}

std::string step_name(StepKind k) {
    switch (k) {
        case StepKind::single_qubit: return "single_qubit";
        case StepKind::entangler: return "entangler";
        case StepKind::edge_removal: return "edge_removal";
        case StepKind::idle_circle: return "idle_circle";
        case StepKind::readout: return "readout";
    }
    return "?";
}

namespace {

SiteRole role_from(const std::string& s) {
    for (auto r : {SiteRole::square_horizontal, SiteRole::square_vertical_mid, SiteRole::circle,
                   SiteRole::readout_square}) {
        if (role_name(r) == s) {
            return r;
        }
    }
    throw InputError("pattern: unknown site role '" + s + "'");
}

StepKind step_from(const std::string& s) {
    for (auto k : {StepKind::single_qubit, StepKind::entangler, StepKind::edge_removal, StepKind::idle_circle,
                   StepKind::readout}) {
        if (step_name(k) == s) {
            return k;
        }
    }
    throw InputError("pattern: unknown step kind '" + s + "'");
}

const MeasurementBasis& computational_basis() {
    static const MeasurementBasis basis = [] {
        std::vector<CVector> v;
        for (int k = 0; k < 4; ++k) {
            v.push_back(CVector::Unit(4, k));
        }
        return MeasurementBasis(std::move(v));
    }();
    return basis;
}

const CVector& plus_ket() {
    static const CVector v = CVector::Constant(2, 1.0 / std::sqrt(2.0));
    return v;
}

std::size_t joint_index(std::span<const int> outcomes) {
    std::size_t j = 0;
    for (int o : outcomes) {
        j = j * 4 + static_cast<std::size_t>(o);
    }
    return j;
}

}  // namespace

std::size_t PatternStep::outcome_count() const {
    if (kind == StepKind::readout) {
        return 1;
    }
    std::size_t n = 1;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        n *= 4;
    }
    return n;
}

std::size_t MeasurementPattern::adaptive_sites() const {
    std::size_t n = 0;
    for (const auto& s : steps) {
        if (s.kind != StepKind::readout) {
            n += s.sites.size();
        }
    }
    return n;
}

bool lattice_has_edge(int wires, int w, int c) {
    if (wires < 2 || w < 0 || w + 1 >= wires || c < 0) {
        return false;
    }
    return wires == 2 || (w + c) % 2 == 0;
}

bool MeasurementPattern::has_edge(int w, int c) const {
    return c < columns && lattice_has_edge(wires(), w, c);
}

// ---------------------------------------------------------------------------
// Compilation

MeasurementPattern compile(const CircuitIR& circuit) {
    circuit.validate();
    const int n = circuit.wires;

    // Positions per wire: 2c is square(w,c), 2c+1 is circle(w,c).
    std::vector<int> cursor(static_cast<std::size_t>(n), 0);
    std::map<std::pair<int, int>, CMatrix> square_gates;  // (column, wire)
    std::map<int, std::vector<int>> cz_upper;              // column -> upper wires

    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        const Gate& g = circuit.gates[i];
        const std::string where = "compile: gate " + std::to_string(i) + ": ";
        if (g.kind == GateKind::cz) {
            if (n < 2) {
                throw InputError(where + "CZ needs two wires");
            }
            const int w = std::min(g.wire, g.other);
            int c = std::max(cursor[static_cast<std::size_t>(w)] / 2, cursor[static_cast<std::size_t>(w + 1)] / 2);
            if (g.column) {
                if (*g.column < c) {
                    throw InputError(where + "column " + std::to_string(*g.column) + " is already occupied");
                }
                c = *g.column;
                if (!lattice_has_edge(n, w, c)) {
                    throw InputError(where + "no vertical edge between wires " + std::to_string(w) + " and " +
                                     std::to_string(w + 1) + " in column " + std::to_string(c));
                }
            }
            while (!lattice_has_edge(n, w, c)) {
                ++c;
            }
            cz_upper[c].push_back(w);
            cursor[static_cast<std::size_t>(w)] = cursor[static_cast<std::size_t>(w + 1)] = 2 * c + 2;
        } else {
            const int w = g.wire;
            int c = (cursor[static_cast<std::size_t>(w)] + 1) / 2;
            if (g.column) {
                if (*g.column < c) {
                    throw InputError(where + "column " + std::to_string(*g.column) + " is already occupied");
                }
                c = *g.column;
            }
            square_gates[{c, w}] = g.kind == GateKind::su2 ? g.matrix : CMatrix(pauli::I());
            cursor[static_cast<std::size_t>(w)] = 2 * c + 1;
        }
    }

    MeasurementPattern p;
    p.circuit = circuit;
    for (int pos : cursor) {
        p.columns = std::max(p.columns, (pos + 1) / 2);
    }

    auto add_site = [&](SiteRole role, int wire, int column) {
        p.sites.push_back({role, wire, column});
        return static_cast<int>(p.sites.size()) - 1;
    };

    for (int c = 0; c < p.columns; ++c) {
        for (int w = 0; w < n; ++w) {
            PatternStep step;
            step.kind = StepKind::single_qubit;
            step.column = c;
            step.sites = {add_site(SiteRole::square_horizontal, w, c)};
            step.wires = {w};
            auto it = square_gates.find({c, w});
            step.gate = it == square_gates.end() ? CMatrix(pauli::I()) : it->second;
            for (int label = 0; label < 4; ++label) {
                const auto rep = hc::su2_representative(step.gate * pauli::sigma()[static_cast<std::size_t>(label)]);
                step.bases_by_label.push_back(hc::single_qubit_basis(rep.v));
                step.factor_by_label.push_back(rep.factor);
            }
            p.steps.push_back(std::move(step));
        }
        if (n < 2) {
            continue;
        }
        std::vector<bool> bonded(static_cast<std::size_t>(n), false);
        const auto& czs = cz_upper[c];
        for (int w = 0; w + 1 < n; ++w) {
            if (!lattice_has_edge(n, w, c)) {
                continue;
            }
            bonded[static_cast<std::size_t>(w)] = bonded[static_cast<std::size_t>(w + 1)] = true;
            PatternStep step;
            step.column = c;
            step.wires = {w, w + 1};
            step.sites = {add_site(SiteRole::square_vertical_mid, w, c), add_site(SiteRole::circle, w, c),
                          add_site(SiteRole::circle, w + 1, c)};
            const bool entangle = std::find(czs.begin(), czs.end(), w) != czs.end();
            step.rules.resize(64);
            if (entangle) {
                step.kind = StepKind::entangler;
                step.push_cz = true;
                step.bases = {hc::entangler_mid_basis(), hc::entangler_circle_basis(), hc::entangler_circle_basis()};
                for (int m = 0; m < 4; ++m) {
                    for (int u = 0; u < 4; ++u) {
                        for (int d = 0; d < 4; ++d) {
                            const auto bp = hc::cz_byproduct(d, m, u);
                            step.rules[static_cast<std::size_t>(m * 16 + u * 4 + d)] = {{bp.top, bp.phase},
                                                                                        {bp.bottom, 1.0}};
                        }
                    }
                }
            } else {
                step.kind = StepKind::edge_removal;
                step.bases = {hc::edge_removal_measurement(), computational_basis(), computational_basis()};
                for (int r = 0; r < 4; ++r) {
                    const auto removal = hc::edge_removal_basis(r);
                    for (int ku = 0; ku < 4; ++ku) {
                        for (int kd = 0; kd < 4; ++kd) {
                            step.rules[static_cast<std::size_t>(r * 16 + ku * 4 + kd)] = {
                                hc::circle_pauli(ku, removal.flip_upper), hc::circle_pauli(kd, removal.flip_lower)};
                        }
                    }
                }
            }
            p.steps.push_back(std::move(step));
        }
        for (int w = 0; w < n; ++w) {
            if (bonded[static_cast<std::size_t>(w)]) {
                continue;
            }
            PatternStep step;
            step.kind = StepKind::idle_circle;
            step.column = c;
            step.wires = {w};
            step.sites = {add_site(SiteRole::circle, w, c)};
            step.bases = {computational_basis()};
            for (int k = 0; k < 4; ++k) {
                step.rules.push_back({hc::circle_pauli(k)});
            }
            p.steps.push_back(std::move(step));
        }
    }

    PatternStep readout;
    readout.kind = StepKind::readout;
    readout.column = p.columns;
    for (int w = 0; w < n; ++w) {
        readout.sites.push_back(add_site(SiteRole::readout_square, w, p.columns));
        readout.wires.push_back(w);
    }
    p.steps.push_back(std::move(readout));
    return p;
}

// ---------------------------------------------------------------------------
// Frames and operators

const MeasurementBasis& basis_for(const PatternStep& step, std::size_t index, const PauliFrame& frame) {
    if (step.kind == StepKind::readout) {
        throw InputError("basis_for: readout sites use the fixed readout projectors");
    }
    if (step.kind == StepKind::single_qubit) {
        const auto label = static_cast<std::size_t>(frame.label(step.wires.at(0)));
        return step.bases_by_label.at(label);
    }
    return step.bases.at(index);
}

PauliFrame advance_frame(const PauliFrame& frame, const PatternStep& step, std::span<const int> outcomes) {
    if (step.kind == StepKind::readout) {
        return frame;
    }
    if (outcomes.size() != step.sites.size()) {
        throw InputError("advance_frame: expected one outcome per site of the step");
    }
    for (int o : outcomes) {
        if (o < 0 || o > 3) {
            throw InputError("advance_frame: outcome " + std::to_string(o) + " out of range 0..3");
        }
    }
    PauliFrame next = frame;
    if (step.kind == StepKind::single_qubit) {
        const int w = step.wires.at(0);
        const auto label = static_cast<std::size_t>(frame.label(w));
        next.reset(w, static_cast<Pauli>(outcomes[0]), 1.0 / step.factor_by_label.at(label));
        return next;
    }
    if (step.push_cz) {
        next.push_cz(step.wires.at(0), step.wires.at(1));
    }
    const auto& rule = step.rules.at(joint_index(outcomes));
    for (std::size_t i = 0; i < step.wires.size(); ++i) {
        next.apply(step.wires[i], rule.at(i));
    }
    return next;
}

CMatrix step_operator(const MeasurementPattern& pattern, const PatternStep& step, const PauliFrame& frame_before,
                      std::span<const int> outcomes) {
    const int n = pattern.wires();
    const Eigen::Index dim = Eigen::Index{1} << n;
    if (step.kind == StepKind::readout) {
        return CMatrix::Identity(dim, dim);
    }
    if (outcomes.size() != step.sites.size()) {
        throw InputError("step_operator: expected one outcome per site of the step");
    }
    auto vec = [&](std::size_t i) -> const CVector& {
        return basis_for(step, i, frame_before)[static_cast<std::size_t>(outcomes[i])];
    };
    switch (step.kind) {
        case StepKind::single_qubit:
            return embed_on_wires(project_site(hc::square_list(), vec(0)), step.wires[0], n);
        case StepKind::idle_circle: {
            const MatrixList list = hc::circle_tensor().close_vertical(plus_ket());
            return embed_on_wires(project_site(list, vec(0)), step.wires[0], n);
        }
        case StepKind::entangler:
        case StepKind::edge_removal: {
            const CMatrix bond = project_site(hc::square_list(), vec(0));
            const CMatrix two = vertical_contract(hc::circle_tensor(), hc::circle_tensor(), vec(1), vec(2), bond);
            return embed_on_wires(two, step.wires[0], n);
        }
        case StepKind::readout:
            break;
    }
    return CMatrix::Identity(dim, dim);
}

// ---------------------------------------------------------------------------
// JSON

json pattern_to_json(const MeasurementPattern& p) {
    json j;
    j["schema"] = "peps-mqc/1";
    j["kind"] = "pattern";
    j["circuit"] = circuit_to_json(p.circuit);
    j["columns"] = p.columns;
    j["sites"] = json::array();
    for (std::size_t i = 0; i < p.sites.size(); ++i) {
        const auto& s = p.sites[i];
        j["sites"].push_back({{"index", i}, {"role", role_name(s.role)}, {"wire", s.wire}, {"column", s.column}});
    }
    auto basis_json = [](const MeasurementBasis& b) {
        json out = json::array();
        for (const auto& v : b.vectors()) {
            out.push_back(json_io::vector_json(v));
        }
        return out;
    };
    j["steps"] = json::array();
    for (const auto& s : p.steps) {
        json sj;
        sj["kind"] = step_name(s.kind);
        sj["column"] = s.column;
        sj["sites"] = s.sites;
        sj["wires"] = s.wires;
        if (s.kind == StepKind::single_qubit) {
            sj["gate"] = json_io::matrix_json(s.gate);
            sj["basis_by_label"] = json::object();
            sj["factor_by_label"] = json::object();
            for (int label = 0; label < 4; ++label) {
                const std::string key(1, pauli_char(static_cast<Pauli>(label)));
                sj["basis_by_label"][key] = basis_json(s.bases_by_label.at(static_cast<std::size_t>(label)));
                sj["factor_by_label"][key] = json_io::complex_json(s.factor_by_label.at(static_cast<std::size_t>(label)));
            }
        } else if (s.kind != StepKind::readout) {
            sj["bases"] = json::array();
            for (const auto& b : s.bases) {
                sj["bases"].push_back(basis_json(b));
            }
            sj["push_cz"] = s.push_cz;
            sj["rules"] = json::array();
            for (const auto& rule : s.rules) {
                json r = json::array();
                for (const auto& pp : rule) {
                    r.push_back({{"pauli", std::string(1, pauli_char(pp.label))},
                                 {"phase", json_io::complex_json(pp.phase)}});
                }
                sj["rules"].push_back(std::move(r));
            }
        } else {
            sj["flip_rule"] = "bit flips when the wire's frame label is X or Y";
        }
        j["steps"].push_back(std::move(sj));
    }
    return j;
}

MeasurementPattern pattern_from_json(const json& j) {
    try {
        if (j.value("kind", "") != "pattern") {
            throw InputError("pattern: missing \"kind\": \"pattern\"");
        }
        MeasurementPattern p;
        p.circuit = circuit_from_json(j.at("circuit"));
        p.columns = j.at("columns").get<int>();
        for (const auto& s : j.at("sites")) {
            p.sites.push_back({role_from(s.at("role").get<std::string>()), s.at("wire").get<int>(),
                               s.at("column").get<int>()});
        }
        auto basis_from = [](const json& b) {
            std::vector<CVector> v;
            for (const auto& x : b) {
                v.push_back(json_io::vector_from(x));
            }
            // Serialized doubles round-trip exactly, but allow for hand-edited input.
            return MeasurementBasis(std::move(v), 1e-9);
        };
        for (const auto& sj : j.at("steps")) {
            PatternStep s;
            s.kind = step_from(sj.at("kind").get<std::string>());
            s.column = sj.at("column").get<int>();
            s.sites = sj.at("sites").get<std::vector<int>>();
            s.wires = sj.at("wires").get<std::vector<int>>();
            for (int site : s.sites) {
                if (site < 0 || static_cast<std::size_t>(site) >= p.sites.size()) {
                    throw InputError("pattern: step references unknown site " + std::to_string(site));
                }
            }
            for (int w : s.wires) {
                if (w < 0 || w >= p.circuit.wires) {
                    throw InputError("pattern: step references unknown wire " + std::to_string(w));
                }
            }
            if (s.kind == StepKind::single_qubit) {
                if (s.sites.size() != 1 || s.wires.size() != 1) {
                    throw InputError("pattern: single_qubit steps have one site and one wire");
                }
                s.gate = json_io::matrix_from(sj.at("gate"), 2);
                for (int label = 0; label < 4; ++label) {
                    const std::string key(1, pauli_char(static_cast<Pauli>(label)));
                    s.bases_by_label.push_back(basis_from(sj.at("basis_by_label").at(key)));
                    s.factor_by_label.push_back(json_io::complex_from(sj.at("factor_by_label").at(key)));
                }
            } else if (s.kind != StepKind::readout) {
                for (const auto& b : sj.at("bases")) {
                    s.bases.push_back(basis_from(b));
                }
                s.push_cz = sj.at("push_cz").get<bool>();
                for (const auto& r : sj.at("rules")) {
                    std::vector<PhasedPauli> rule;
                    for (const auto& pp : r) {
                        const auto label = pp.at("pauli").get<std::string>();
                        if (label.size() != 1) {
                            throw InputError("pattern: bad Pauli label '" + label + "'");
                        }
                        rule.push_back({pauli_from_char(label[0]), json_io::complex_from(pp.at("phase"))});
                    }
                    if (rule.size() != s.wires.size()) {
                        throw InputError("pattern: rule size does not match the step's wires");
                    }
                    s.rules.push_back(std::move(rule));
                }
                if (s.bases.size() != s.sites.size() || s.rules.size() != s.outcome_count()) {
                    throw InputError("pattern: step tables do not match its sites");
                }
                if (s.push_cz && s.wires.size() != 2) {
                    throw InputError("pattern: CZ push needs two wires");
                }
            }
            p.steps.push_back(std::move(s));
        }
        if (p.steps.empty() || p.steps.back().kind != StepKind::readout) {
            throw InputError("pattern: the last step must be the readout");
        }
        return p;
    } catch (const json::exception& e) {
        throw InputError(std::string("pattern: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Simulation

unsigned default_thread_count() {
    if (const char* env = std::getenv("PEPS_MQC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return 1;
}

std::size_t branch_count(const MeasurementPattern& pattern) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < pattern.adaptive_sites(); ++i) {
        if (n > (std::size_t{1} << 60)) {
            return std::numeric_limits<std::size_t>::max();
        }
        n *= 4;
    }
    return n;
}

namespace {

std::vector<double> distribution_of(const CVector& state) {
    std::vector<double> p(static_cast<std::size_t>(state.size()));
    const double norm = state.squaredNorm();
    for (Eigen::Index i = 0; i < state.size(); ++i) {
        p[static_cast<std::size_t>(i)] = norm > 0.0 ? std::norm(state(i)) / norm : 0.0;
    }
    return p;
}

std::vector<double> corrected(const std::vector<double>& raw, unsigned mask) {
    std::vector<double> out(raw.size(), 0.0);
    for (std::size_t b = 0; b < raw.size(); ++b) {
        out[b ^ mask] += raw[b];
    }
    return out;
}

using NodePtr = std::shared_ptr<const MeasurementBackend::Node>;

struct Walker {
    const MeasurementPattern& pattern;
    const SimulationOptions& options;
    CMatrix target;
    CVector input;
    std::mt19937_64* rng = nullptr;  // sample mode

    void finish(const PauliFrame& frame, const CMatrix& map, std::vector<int> outcomes, double prob,
                const NodePtr& node, std::vector<BranchResult>& out) const {
        BranchResult r;
        r.outcomes = std::move(outcomes);
        r.frame = frame;
        r.logical_map = map;
        const CMatrix corrected_map = frame.matrix().adjoint() * map;
        r.map_residual = distance_up_to_scale_phase(corrected_map, target);
        const cplx overlap = (target.adjoint() * corrected_map).trace();
        r.phase_error = std::abs(std::arg(overlap));
        const unsigned mask = frame.flip_mask();
        r.predicted_readout = corrected(distribution_of(map * input), mask);
        if (options.backend != nullptr) {
            r.probability = prob;
            r.readout = node ? corrected(options.backend->readout_distribution(*node), mask)
                             : std::vector<double>(r.predicted_readout.size(), 0.0);
        } else {
            r.readout = r.predicted_readout;
        }
        out.push_back(std::move(r));
    }

    // Walks site `index` of step `step_index`; `partial` holds the outcomes of
    // earlier sites of the same step.
    void walk(std::size_t step_index, std::size_t index, std::vector<int> partial, const PauliFrame& frame,
              const CMatrix& map, std::vector<int>& outcomes, double prob, const NodePtr& node,
              std::vector<BranchResult>& out, int forced = -1) const {
        const PatternStep& step = pattern.steps[step_index];
        if (step.kind == StepKind::readout) {
            finish(frame, map, outcomes, prob, node, out);
            return;
        }
        if (index == step.sites.size()) {
            const CMatrix op = step_operator(pattern, step, frame, partial);
            const PauliFrame next = advance_frame(frame, step, partial);
            walk(step_index + 1, 0, {}, next, op * map, outcomes, prob, node, out);
            return;
        }
        const MeasurementBasis& basis = basis_for(step, index, frame);
        const int site = step.sites[index];

        auto descend = [&](int k, double p, const NodePtr& child) {
            partial.push_back(k);
            outcomes.push_back(k);
            walk(step_index, index + 1, partial, frame, map, outcomes, prob * p, child, out);
            outcomes.pop_back();
            partial.pop_back();
        };

        if (rng != nullptr) {
            int chosen = 0;
            double p = 1.0;
            NodePtr child;
            if (options.backend != nullptr && node) {
                std::array<std::pair<double, NodePtr>, 4> branches;
                for (int k = 0; k < 4; ++k) {
                    branches[static_cast<std::size_t>(k)] =
                        options.backend->measure(*node, site, basis[static_cast<std::size_t>(k)]);
                }
                std::uniform_real_distribution<double> u(0.0, 1.0);
                double x = u(*rng);
                chosen = 3;
                for (int k = 0; k < 4; ++k) {
                    x -= branches[static_cast<std::size_t>(k)].first;
                    if (x < 0.0) {
                        chosen = k;
                        break;
                    }
                }
                p = branches[static_cast<std::size_t>(chosen)].first;
                child = branches[static_cast<std::size_t>(chosen)].second;
            } else {
                chosen = std::uniform_int_distribution<int>(0, 3)(*rng);
            }
            descend(chosen, p, child);
            return;
        }

        for (int k = 0; k < 4; ++k) {
            if (forced >= 0 && k != forced) {
                continue;
            }
            double p = 1.0;
            NodePtr child;
            if (options.backend != nullptr && node) {
                std::tie(p, child) = options.backend->measure(*node, site, basis[static_cast<std::size_t>(k)]);
            } else if (options.backend != nullptr) {
                p = 0.0;
            }
            descend(k, p, child);
        }
    }
};

}  // namespace

SimulationReport simulate_pattern(const MeasurementPattern& pattern, const SimulationOptions& options) {
    if (pattern.steps.empty() || pattern.steps.back().kind != StepKind::readout) {
        throw InputError("simulate_pattern: pattern must end with a readout step");
    }
    const std::size_t count = branch_count(pattern);
    if (options.mode == SimulationOptions::Mode::enumerate && count > options.max_branches) {
        throw ResourceCapError("simulate_pattern: " + std::to_string(pattern.adaptive_sites()) +
                               " adaptive sites give more than " + std::to_string(options.max_branches) +
                               " branches");
    }
    if (options.mode == SimulationOptions::Mode::sample && options.samples > options.max_branches) {
        throw ResourceCapError("simulate_pattern: sample count exceeds the branch cap");
    }

    Walker walker{pattern, options, pattern.circuit.unitary(), pattern.circuit.input_vector()};
    const Eigen::Index dim = Eigen::Index{1} << pattern.wires();
    const CMatrix start = CMatrix::Identity(dim, dim);
    const PauliFrame frame(pattern.wires());
    const NodePtr root = options.backend ? options.backend->root() : nullptr;

    SimulationReport report;
    if (options.mode == SimulationOptions::Mode::sample) {
        std::mt19937_64 rng(options.seed);
        walker.rng = &rng;
        for (std::size_t s = 0; s < options.samples; ++s) {
            std::vector<int> outcomes;
            walker.walk(0, 0, {}, frame, start, outcomes, 1.0, root, report.branches);
        }
    } else {
        const unsigned threads = std::clamp(options.threads ? options.threads : default_thread_count(), 1U, 4U);
        const bool split = threads > 1 && pattern.adaptive_sites() > 0;
        if (!split) {
            std::vector<int> outcomes;
            walker.walk(0, 0, {}, frame, start, outcomes, 1.0, root, report.branches);
        } else {
            // The four outcomes of the first site are independent subtrees.
            std::array<std::vector<BranchResult>, 4> parts;
            std::array<std::exception_ptr, 4> errors;
            auto run = [&](int k) {
                try {
                    std::vector<int> outcomes;
                    walker.walk(0, 0, {}, frame, start, outcomes, 1.0, root, parts[static_cast<std::size_t>(k)], k);
                } catch (...) {
                    errors[static_cast<std::size_t>(k)] = std::current_exception();
                }
            };
            for (int first = 0; first < 4; first += static_cast<int>(threads)) {
                std::vector<std::thread> pool;
                for (int k = first; k < std::min(4, first + static_cast<int>(threads)); ++k) {
                    pool.emplace_back(run, k);
                }
                for (auto& t : pool) {
                    t.join();
                }
            }
            for (int k = 0; k < 4; ++k) {
                if (errors[static_cast<std::size_t>(k)]) {
                    std::rethrow_exception(errors[static_cast<std::size_t>(k)]);
                }
                auto& part = parts[static_cast<std::size_t>(k)];
                std::move(part.begin(), part.end(), std::back_inserter(report.branches));
            }
        }
    }

    report.circuit_distribution = distribution_of(walker.target * walker.input);
    if (options.backend != nullptr) {
        report.marginal.assign(report.circuit_distribution.size(), 0.0);
    }
    for (const auto& b : report.branches) {
        report.max_map_residual = std::max(report.max_map_residual, b.map_residual);
        if (b.probability && options.mode == SimulationOptions::Mode::enumerate) {
            report.total_probability += *b.probability;
            for (std::size_t i = 0; i < b.readout.size(); ++i) {
                report.marginal[i] += *b.probability * b.readout[i];
            }
        }
    }
    return report;
}

}  // namespace pepsmqc

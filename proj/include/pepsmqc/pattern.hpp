#pragma once

// Circuit IR, compilation to adaptive measurement patterns on the honeycomb
// lattice, and branch simulation in correlation space.
//
// Lattice: wires are rows. Column c of wire w holds square(w,c) followed by
// circle(w,c) in the direction of correlation flow; each wire ends in a readout
// square. With one wire there are no circles. With two wires a vertical edge
// joins the circles of every column; with three or more the edges form a brick
// wall: edge (w, w+1) exists in column c iff w + c is even.

#include <array>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pepsmqc/correlation.hpp"
#include "pepsmqc/pauli_frame.hpp"

namespace pepsmqc {

enum class GateKind { su2, cz, skip };

struct Gate {
    GateKind kind = GateKind::skip;
    int wire = 0;    // su2 / skip; upper wire of a cz
    int other = -1;  // second wire of a cz
    CMatrix matrix;  // su2 only; any 2x2 unitary
    std::optional<int> column;
};

enum class InputState { zero, plus };

struct CircuitIR {
    int wires = 0;
    std::vector<Gate> gates;
    std::vector<InputState> inputs;  // empty: all |0>

    /// Throws InputError on empty circuits, bad wires, non-adjacent CZ or non-unitary matrices.
    void validate() const;
    /// Intended 2^n x 2^n unitary, wire 0 most significant.
    CMatrix unitary() const;
    CVector input_vector() const;
    CVector input_vector(int wire) const;
};

CircuitIR circuit_from_json(const nlohmann::json& j);
nlohmann::json circuit_to_json(const CircuitIR& c);

enum class SiteRole { square_horizontal, square_vertical_mid, circle, readout_square };
std::string role_name(SiteRole r);

struct PatternSite {
    SiteRole role;
    int wire;  // upper wire for a mid square
    int column;
};

enum class StepKind { single_qubit, entangler, edge_removal, idle_circle, readout };
std::string step_name(StepKind k);

struct PatternStep {
    StepKind kind;
    int column = -1;
    std::vector<int> sites;  // measurement order inside the step
    std::vector<int> wires;  // wires whose frame the step updates

    // single_qubit: the intended gate, and per incoming frame label the basis
    // realizing gate * label and the factor w with gate * label = w * V, V in SU(2).
    CMatrix gate;
    std::vector<MeasurementBasis> bases_by_label;
    std::vector<cplx> factor_by_label;

    // Other steps: one fixed basis per site, and per joint outcome (first site
    // most significant) the Pauli applied to each wire in `wires`.
    std::vector<MeasurementBasis> bases;
    std::vector<std::vector<PhasedPauli>> rules;
    bool push_cz = false;  // entangler: frame is conjugated by CZ before the rule

    std::size_t outcome_count() const;
};

struct MeasurementPattern {
    CircuitIR circuit;
    std::vector<PatternSite> sites;
    std::vector<PatternStep> steps;
    int columns = 0;

    int wires() const { return circuit.wires; }
    /// Number of measured sites before readout.
    std::size_t adaptive_sites() const;
    /// True if a vertical edge joins wires (w, w+1) in column c.
    bool has_edge(int w, int c) const;
};

bool lattice_has_edge(int wires, int w, int c);

MeasurementPattern compile(const CircuitIR& circuit);

nlohmann::json pattern_to_json(const MeasurementPattern& p);
MeasurementPattern pattern_from_json(const nlohmann::json& j);

/// Basis to use for site `index` of `step` given the frame at the start of the step.
const MeasurementBasis& basis_for(const PatternStep& step, std::size_t index, const PauliFrame& frame);

/// Frame after `step` with the given per-site outcomes.
PauliFrame advance_frame(const PauliFrame& frame, const PatternStep& step, std::span<const int> outcomes);

/// Correlation-space operator (2^n x 2^n) realized by `step` with the given
/// outcomes, contracted from the model tensors.
CMatrix step_operator(const MeasurementPattern& pattern, const PatternStep& step, const PauliFrame& frame_before,
                      std::span<const int> outcomes);

// ---------------------------------------------------------------------------
// Simulation

/// Physical probabilities for branch simulation, e.g. the state-vector oracle.
class MeasurementBackend {
  public:
    class Node {
      public:
        virtual ~Node() = default;
    };
    virtual ~MeasurementBackend() = default;
    virtual std::shared_ptr<const Node> root() const = 0;
    /// Conditional probability of projecting `site` onto `vector`, and the
    /// normalized post-measurement node (null when the probability is zero).
    virtual std::pair<double, std::shared_ptr<const Node>> measure(const Node& node, int site,
                                                                   const CVector& vector) const = 0;
    /// Distribution of raw readout bits, wire 0 most significant.
    virtual std::vector<double> readout_distribution(const Node& node) const = 0;
};

struct SimulationOptions {
    enum class Mode { enumerate, sample };
    Mode mode = Mode::enumerate;
    std::size_t samples = 1;
    std::uint64_t seed = 1;
    std::size_t max_branches = std::size_t{1} << 20;  // 4^10
    unsigned threads = 0;  // 0: PEPS_MQC_THREADS or 1
    const MeasurementBackend* backend = nullptr;
};

struct BranchResult {
    std::vector<int> outcomes;          // per adaptive site, pattern order
    std::optional<double> probability;  // only with a backend
    PauliFrame frame;
    CMatrix logical_map;      // accumulated correlation operator
    double map_residual;      // scale/phase distance of frame^dagger * map to the circuit unitary
    double phase_error;       // |arg| of the remaining phase once the tracked frame phase is removed
    std::vector<double> readout;            // corrected bit distribution (backend if attached)
    std::vector<double> predicted_readout;  // corrected, from the correlation state
};

struct SimulationReport {
    std::vector<BranchResult> branches;
    std::vector<double> circuit_distribution;  // circuit-model reference
    std::vector<double> marginal;              // probability-weighted readout (backend only)
    double total_probability = 0.0;
    double max_map_residual = 0.0;
};

/// Number of outcome branches of the adaptive part of the pattern.
std::size_t branch_count(const MeasurementPattern& pattern);

/// Throws ResourceCapError when enumeration would exceed max_branches.
SimulationReport simulate_pattern(const MeasurementPattern& pattern, const SimulationOptions& options = {});

unsigned default_thread_count();

}  // namespace pepsmqc

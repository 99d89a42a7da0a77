#pragma once

// Brute-force physical state of a small lattice patch. The patch is contracted
// into an explicit vector over all site levels, measured with the Born rule,
// and used as the probability backend for pattern simulation.

#include <memory>
#include <vector>

#include "pepsmqc/numerics.hpp"
#include "pepsmqc/pattern.hpp"

namespace pepsmqc::oracle {

struct LayoutSite {
    SiteRole role = SiteRole::square_horizontal;
    int wire = 0;
    int column = 0;
    int leg = -1;  // circles only: vertical leg id, -1 closes the leg with |+>
};

/// Mid square `site` joins the vertical legs of two circles.
struct VerticalBond {
    int site = 0;
    int upper_leg = 0;
    int lower_leg = 0;
};

struct PatchLayout {
    std::vector<LayoutSite> sites;        // global order; site id = index
    std::vector<std::vector<int>> chains;  // per wire, starting next to the right boundary
    std::vector<VerticalBond> bonds;
    std::vector<CVector> right;  // per chain
    CVector left;                // shared left boundary, default <0|
    int legs = 0;
};

/// One wire of squares between <left| and |right>.
PatchLayout row_layout(int squares, const CVector& left, const CVector& right);

/// Layout of every site of a compiled pattern, site ids matching the pattern.
/// Right boundaries are the circuit's input states.
PatchLayout layout_of(const MeasurementPattern& pattern);

struct PatchState {
    std::vector<int> sites;  // remaining sites, ascending; first is the most significant level
    CVector amplitudes;

    std::size_t size() const { return sites.size(); }
};

/// Throws ResourceCapError above `max_sites` and InputError for an empty
/// layout or a zero-norm state.
PatchState build_patch(const PatchLayout& layout, int max_sites = 10);

struct Measurement {
    double probability = 0.0;
    std::optional<PatchState> post;  // empty when the probability vanishes
};

/// Projects `site` onto `vector` (a unit vector of the site's level space).
Measurement measure_site(const PatchState& state, int site, const CVector& vector);

/// Supplies physical branch probabilities to simulate_pattern.
class PatternBackend : public MeasurementBackend {
  public:
    PatternBackend(const MeasurementPattern& pattern, int max_sites = 10);

    std::shared_ptr<const Node> root() const override;
    std::pair<double, std::shared_ptr<const Node>> measure(const Node& node, int site,
                                                           const CVector& vector) const override;
    /// The remaining sites must be the readout squares.
    std::vector<double> readout_distribution(const Node& node) const override;

    const PatchState& initial() const { return initial_; }

  private:
    PatchState initial_;
};

struct CrossValidationOptions {
    int max_sites = 10;
    double tolerance = 1e-9;
    unsigned threads = 0;
    std::size_t max_branches = std::size_t{1} << 20;
};

struct CrossValidationReport {
    MeasurementPattern pattern;
    SimulationReport simulation;
    std::size_t branches = 0;
    std::size_t supported_branches = 0;  // probability above 1e-12
    double max_map_residual = 0.0;       // over supported branches
    double max_readout_error = 0.0;      // per branch, against the circuit model
    double marginal_error = 0.0;
    double probability_error = 0.0;  // |total - 1|
    bool passed = false;
};

CrossValidationReport cross_validate(const CircuitIR& circuit, const CrossValidationOptions& options = {});

nlohmann::json report_to_json(const CrossValidationReport& report);

}  // namespace pepsmqc::oracle

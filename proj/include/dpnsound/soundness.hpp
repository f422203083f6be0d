#pragma once

#include "dpnsound/constraint_graph.hpp"
#include "dpnsound/dds.hpp"
#include "dpnsound/dpn.hpp"
#include "dpnsound/smt.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dpnsound {

enum class Property { P1, P2, P3 };

std::string_view to_string(Property p);

struct WitnessStep {
    TransitionFiring firing;
    DpnState state; // after the firing
};

// A concrete run from (M_I, alpha_I).
struct Witness {
    DpnState initial;
    std::vector<WitnessStep> steps;
    std::vector<std::size_t> cg_path; // edge ids of the main constraint graph

    [[nodiscard]] const DpnState& last() const { return steps.empty() ? initial : steps.back().state; }
};

struct Violation {
    Property property;
    std::optional<std::size_t> node;           // P1/P2: main-graph node
    std::optional<Constraint> blocked_formula; // P1 only, over placeholder variables
    std::optional<Witness> witness;            // P1/P2
    std::vector<std::string> dead_transitions; // P3
};

struct CheckConfig {
    unsigned bound = 1;
    std::size_t budget = 10000;
    bool short_circuit = true;
    unsigned jobs = 1;
    ExplorationOrder order = ExplorationOrder::Bfs;
};

struct SoundnessReport {
    std::string net;
    std::optional<bool> sound; // nullopt: inconclusive
    std::optional<Property> violated;
    std::optional<Witness> witness;
    std::vector<std::string> dead_transitions;
    std::vector<Violation> violations; // every violation found, in check order
    std::string error;                 // reason when inconclusive
    SolverStats stats;
    std::chrono::nanoseconds elapsed{0}; // wall time of check_sound
    std::pair<std::size_t, std::size_t> dds_size{0, 0};
    std::pair<std::size_t, std::size_t> cg_size{0, 0};

    std::shared_ptr<const Dds> dds;
    std::shared_ptr<const ConstraintGraph> cg;
};

// Main-graph nodes whose marking covers M_F without being M_F, shallowest first.
std::vector<std::size_t> bad_termination(const ConstraintGraph& cg, const Dds& dds, const Dpn& dpn);

// Transitions (by id, in net order) that label no edge of the main graph.
std::vector<std::string> dead_transitions(const ConstraintGraph& cg, const Dpn& dpn);

struct BlockedHit {
    std::size_t node;
    Constraint formula;
    Assignment model; // over placeholder variables
};

// Non-final nodes whose blocked formula is satisfiable, shallowest first.  Stops after the
// first hit unless `all` is set.  Throws Inconclusive on UNKNOWN.
std::vector<BlockedHit> blocked_states(const ConstraintGraph& cg, SymbolicEngine& engine, bool all);

// Concrete run along the main-graph path to `node`.  `end` constrains the values at the last
// state (placeholder variables stand for them); pass truth() for none.  The run is replayed
// through the net's firing rule; throws WitnessReplayFailed if that fails.
Witness extract_witness(const Dpn& dpn, const Dds& dds, const ConstraintGraph& cg, std::size_t node,
                        const Constraint& end, SmtGateway& gateway);

// Throws BoundExceeded.  Budget exhaustion and solver UNKNOWN give an inconclusive report.
SoundnessReport check_sound(const Dpn& dpn, const CheckConfig& config, SmtGateway& gateway);

} // namespace dpnsound

#pragma once

#include "dpnsound/constraint_graph.hpp"
#include "dpnsound/dds.hpp"
#include "dpnsound/soundness.hpp"

#include <set>
#include <string>

namespace dpnsound {

// Node and edge ids drawn in red.
struct DotHighlight {
    std::set<std::size_t> nodes;
    std::set<std::size_t> edges;
};

std::string dds_to_dot(const Dds& dds, const DotHighlight& highlight = {});

// Record nodes "state | formula"; nodes in the final state get a double border.
std::string cg_to_dot(const ConstraintGraph& cg, const Dds& dds, const DotHighlight& highlight = {});

// Main-graph highlighting for a report: the first witness path, every node carrying a
// violation, and every node whose marking strictly covers M_F.
DotHighlight cg_highlight(const SoundnessReport& report, const Dpn& dpn);

// DDS states and edges traversed by the first witness.
DotHighlight dds_highlight(const SoundnessReport& report);

} // namespace dpnsound

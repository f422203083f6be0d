#pragma once

#include "dpnsound/dpn.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dpnsound {

struct DdsEdge {
    std::size_t source;
    std::string transition; // originating DPN transition id
    std::string action;     // its label
    std::size_t target;
};

// Finite labelled transition system over bounded markings.  State 0 is the initial state;
// the final marking is always a state even when the flow never reaches it.
struct Dds {
    std::vector<Marking> states;
    std::size_t initial = 0;
    std::size_t final_state = 0;
    std::vector<DdsEdge> edges;
    std::vector<std::vector<std::size_t>> outgoing; // state -> edge indices
    std::vector<Var> variables;
    Assignment initial_assignment;
    std::map<std::string, Constraint> guards; // transition id -> guard

    [[nodiscard]] bool is_final(std::size_t state) const { return state == final_state; }
    [[nodiscard]] std::optional<std::size_t> find(const Marking& m) const;
    [[nodiscard]] std::string state_name(std::size_t state) const { return to_string(states.at(state)); }
};

// Markings reachable from M_I through the flow relation alone, each bounded by k.
// Throws BoundExceeded when some reachable marking puts more than k tokens in a place.
Dds dpn_to_dds(const Dpn& dpn, unsigned k);

struct DdsConfig {
    std::size_t state;
    Assignment assignment;
};

// One step along the edge of `firing.transition` leaving config.state.  Throws NotEnabled.
DdsConfig dds_step(const Dds& dds, const DdsConfig& config, const TransitionFiring& firing);

} // namespace dpnsound

#pragma once

#include "dpnsound/dpn.hpp"
#include "dpnsound/soundness.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dpnsound {

// Finite value lists per variable.  The oracle decides the box-restricted system only.
struct DomainBox {
    std::map<std::string, std::vector<Value>> values;

    // ints -3..3, rationals {-2,-1,-1/2,0,1/2,1,2}, booleans both
    static DomainBox defaults(const Dpn& dpn);

    // "int=-3..3;rat=-1,-1/2,0,1/2,1;o=0..5": sort-wide entries first, then per-variable
    // overrides.  Throws std::invalid_argument.
    static DomainBox parse(const std::string& spec, const Dpn& dpn);

    [[nodiscard]] const std::vector<Value>& of(const Var& v) const;
    [[nodiscard]] bool contains(const Var& v, const Value& value) const;
};

struct ExplicitEdge {
    std::size_t source;
    TransitionFiring firing;
    std::size_t target;
};

struct ExplicitGraph {
    std::vector<DpnState> states; // states[0] is the start state
    std::vector<ExplicitEdge> edges;
    std::vector<std::vector<std::size_t>> outgoing;

    [[nodiscard]] std::optional<std::size_t> find(const DpnState& s) const;
};

// Every state reachable from `start` (default (M_I, alpha_I)) when written values range
// over the box.  Throws ExplosionGuard past `cap` states, BoundExceeded past k tokens.
ExplicitGraph enumerate_state_space(const Dpn& dpn, const DomainBox& box, unsigned k,
                                    std::optional<DpnState> start = std::nullopt, std::size_t cap = 1000000);

struct OracleVerdict {
    bool sound = true;
    std::optional<Property> violated; // first in P2, P3, P1 order
    std::vector<std::string> dead_transitions;
    std::vector<std::size_t> bad_states;     // P2
    std::vector<std::size_t> blocked_states; // P1
    ExplicitGraph graph;
};

OracleVerdict oracle_soundness(const Dpn& dpn, const DomainBox& box, unsigned k, std::size_t cap = 1000000);

// States of `graph` from which some state with marking M_F is reachable.
std::vector<bool> coreachable(const ExplicitGraph& graph, const Marking& final_marking);

} // namespace dpnsound

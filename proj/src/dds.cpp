#include "dpnsound/dds.hpp"

#include "dpnsound/errors.hpp"

#include <deque>

namespace dpnsound {

std::optional<std::size_t> Dds::find(const Marking& m) const
{
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == m)
            return i;
    return std::nullopt;
}

Dds dpn_to_dds(const Dpn& dpn, unsigned k)
{
    if (dpn.initial_marking.max_tokens() > k || dpn.final_marking.max_tokens() > k)
        throw BoundExceeded("initial or final marking exceeds the bound " + std::to_string(k));

    Dds dds;
    dds.variables = dpn.variables;
    dds.initial_assignment = dpn.initial_assignment;
    for (const auto& t : dpn.transitions)
        dds.guards.emplace(t.id, t.guard);

    std::vector<std::pair<Marking, Marking>> effects; // preset, postset per transition
    for (const auto& t : dpn.transitions)
        effects.emplace_back(dpn.preset(t), dpn.postset(t));

    std::map<Marking, std::size_t> index;
    std::deque<std::size_t> work;
    auto intern = [&](const Marking& m) {
        auto [it, inserted] = index.emplace(m, dds.states.size());
        if (inserted) {
            dds.states.push_back(m);
            dds.outgoing.emplace_back();
            work.push_back(it->second);
        }
        return it->second;
    };

    dds.initial = intern(dpn.initial_marking);
    while (!work.empty()) {
        std::size_t s = work.front();
        work.pop_front();
        for (std::size_t i = 0; i < dpn.transitions.size(); ++i) {
            const auto& [pre, post] = effects[i];
            const Marking current = dds.states[s];
            if (!current.covers(pre))
                continue;
            Marking next = current;
            for (const auto& [p, n] : pre.tokens())
                next.set(p, current[p] - n);
            for (const auto& [p, n] : post.tokens())
                next.add(p, n);
            if (next.max_tokens() > k)
                throw BoundExceeded("transition '" + dpn.transitions[i].id + "' leads from " + to_string(current)
                                    + " to " + to_string(next) + ", exceeding the bound " + std::to_string(k));
            std::size_t target = intern(next);
            dds.outgoing[s].push_back(dds.edges.size());
            dds.edges.push_back({s, dpn.transitions[i].id, dpn.transitions[i].label, target});
        }
    }
    dds.final_state = intern(dpn.final_marking);
    work.clear();
    return dds;
}

DdsConfig dds_step(const Dds& dds, const DdsConfig& config, const TransitionFiring& firing)
{
    const DdsEdge* edge = nullptr;
    for (std::size_t e : dds.outgoing.at(config.state))
        if (dds.edges[e].transition == firing.transition)
            edge = &dds.edges[e];
    if (edge == nullptr)
        throw NotEnabled("no '" + firing.transition + "' edge leaves " + dds.state_name(config.state));

    const Constraint& guard = dds.guards.at(firing.transition);
    for (const auto& v : dds.variables) {
        Var r = v.read();
        if (firing.beta.contains(r) && firing.beta.at(r) != config.assignment.at(v))
            throw NotEnabled("firing reads a value of " + v.name + " the configuration does not hold");
    }
    bool holds = false;
    try {
        holds = evaluate(guard, firing.beta);
    } catch (const UnboundVariable& e) {
        throw NotEnabled(std::string("incomplete firing: ") + e.what());
    }
    if (!holds)
        throw NotEnabled("guard of '" + firing.transition + "' is false under the firing");

    DdsConfig next{edge->target, config.assignment};
    for (const auto& v : write_vars(guard))
        next.assignment.set(v, firing.beta.at(v.written()));
    return next;
}

} // namespace dpnsound

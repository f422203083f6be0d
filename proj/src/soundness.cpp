#include "dpnsound/soundness.hpp"

#include "dpnsound/errors.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <thread>

namespace dpnsound {

std::string_view to_string(Property p)
{
    switch (p) {
    case Property::P1:
        return "P1";
    case Property::P2:
        return "P2";
    case Property::P3:
        return "P3";
    }
    return "?";
}

std::vector<std::size_t> bad_termination(const ConstraintGraph& cg, const Dds& dds, const Dpn& dpn)
{
    std::vector<std::size_t> out;
    for (std::size_t n : cg.by_depth()) {
        const Marking& m = dds.states[cg.nodes[n].state];
        if (m.covers(dpn.final_marking) && m != dpn.final_marking)
            out.push_back(n);
    }
    return out;
}

std::vector<std::string> dead_transitions(const ConstraintGraph& cg, const Dpn& dpn)
{
    std::set<std::string> used;
    for (const auto& e : cg.edges)
        used.insert(e.transition);
    std::vector<std::string> out;
    for (const auto& t : dpn.transitions)
        if (!used.contains(t.id))
            out.push_back(t.id);
    return out;
}

namespace {

// Drops conjuncts implied by the remaining ones.  Disjunctions go first: they are what the
// negated continuation leaves behind.
Constraint drop_redundant(const Constraint& c, SmtGateway& gateway)
{
    const auto* conj = std::get_if<AndNode>(&c.node().value);
    if (conj == nullptr)
        return c;
    std::vector<Constraint> kept = conj->children;
    for (bool disjunctions : {true, false}) {
        for (std::size_t i = 0; i < kept.size();) {
            if (std::holds_alternative<OrNode>(kept[i].node().value) != disjunctions) {
                ++i;
                continue;
            }
            std::vector<Constraint> rest = kept;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
            if (gateway.is_sat(Constraint::conj(rest) && !kept[i]).unsat())
                kept = std::move(rest);
            else
                ++i;
        }
    }
    return Constraint::conj(std::move(kept));
}

} // namespace

std::vector<BlockedHit> blocked_states(const ConstraintGraph& cg, SymbolicEngine& engine, bool all)
{
    std::vector<BlockedHit> out;
    for (std::size_t n : cg.by_depth()) {
        const CgNode& node = cg.nodes[n];
        if (engine.dds().is_final(node.state))
            continue;
        Constraint formula = engine.blocked(node.state, node.formula);
        SatResult r = engine.gateway().is_sat(formula);
        if (r.unknown())
            throw Inconclusive("blocked-state query is unknown: " + r.reason);
        if (r.sat()) {
            out.push_back({n, drop_redundant(formula, engine.gateway()), r.model});
            if (!all)
                break;
        }
    }
    return out;
}

Witness extract_witness(const Dpn& dpn, const Dds& dds, const ConstraintGraph& cg, std::size_t node,
                        const Constraint& end, SmtGateway& gateway)
{
    std::vector<std::size_t> path = path_to_node(cg, node);
    const std::size_t n = path.size();
    auto at = [](const Var& v, std::size_t i) { return v.plain().copy(std::to_string(i)); };

    std::vector<Constraint> parts;
    {
        Substitution sub;
        for (const auto& v : dds.variables)
            sub.emplace(v.plain(), at(v, 0));
        parts.push_back(rename(assignment_formula(dds.initial_assignment), sub));
    }
    for (std::size_t i = 1; i <= n; ++i) {
        const std::string& t = cg.edges[path[i - 1]].transition;
        Substitution sub;
        for (const auto& v : dds.variables) {
            sub.emplace(v.read(), at(v, i - 1));
            sub.emplace(v.written(), at(v, i));
        }
        parts.push_back(rename(transition_formula(dds.guards.at(t), dds.variables), sub));
    }
    {
        Substitution sub;
        for (const auto& v : dds.variables) {
            sub.emplace(v.placeholder(), at(v, n));
            sub.emplace(v.plain(), at(v, n));
        }
        parts.push_back(rename(end, sub));
    }

    SatResult r = gateway.is_sat(Constraint::conj(std::move(parts)));
    if (r.unknown())
        throw Inconclusive("witness query is unknown: " + r.reason);
    if (r.unsat())
        throw WitnessReplayFailed("no concrete run follows the constraint-graph path to node " + std::to_string(node));

    auto values_at = [&](std::size_t i) {
        Assignment a;
        for (const auto& v : dds.variables) {
            Var c = at(v, i);
            a.set(v.plain(), r.model.contains(c) ? r.model.at(c) : zero_value(v.sort));
        }
        return a;
    };

    Witness w;
    w.initial = DpnState{dpn.initial_marking, dpn.initial_assignment};
    w.cg_path = path;
    DpnState current = w.initial;
    for (std::size_t i = 1; i <= n; ++i) {
        const CgEdge& edge = cg.edges[path[i - 1]];
        const Transition& t = dpn.transition(edge.transition);
        Assignment target = values_at(i);
        TransitionFiring firing{t.id, make_beta(dpn, current, t, target)};
        DpnState next;
        try {
            next = fire(dpn, current, firing);
        } catch (const NotEnabled& e) {
            throw WitnessReplayFailed("step " + std::to_string(i) + " (" + t.id + ") does not replay: " + e.what());
        }
        if (next.assignment != target)
            throw WitnessReplayFailed("step " + std::to_string(i) + " (" + t.id + ") reaches other values than the model");
        if (next.marking != dds.states[cg.nodes[edge.target].state])
            throw WitnessReplayFailed("step " + std::to_string(i) + " (" + t.id + ") reaches another marking");
        w.steps.push_back({std::move(firing), next});
        current = std::move(next);
    }

    Assignment last;
    for (const auto& v : dds.variables) {
        last.set(v.placeholder(), current.assignment.at(v));
        last.set(v.plain(), current.assignment.at(v));
    }
    if (!evaluate(end, last))
        throw WitnessReplayFailed("the replayed run does not satisfy the end-point constraint");
    return w;
}

namespace {

SolverStats delta(const SolverStats& after, const SolverStats& before)
{
    SolverStats d;
    d.sat_checks = after.sat_checks - before.sat_checks;
    d.qe_calls = after.qe_calls - before.qe_calls;
    d.equiv_checks = after.equiv_checks - before.equiv_checks;
    d.cache_hits = after.cache_hits - before.cache_hits;
    d.elapsed = after.elapsed - before.elapsed;
    return d;
}

// final(b) and its eliminated disjunction for every state, split round-robin over workers
// that each own a solver session.
SolverStats precompute_continuations(const Dds& dds, const std::vector<std::size_t>& states, SmtGateway& gateway,
                                     const CgOptions& options, const std::shared_ptr<FinalMemo>& memo, unsigned jobs)
{
    std::vector<SolverStats> stats(jobs);
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
            try {
                SmtGateway local(gateway.config(), gateway.cache());
                SymbolicEngine engine(dds, local, options, memo);
                for (std::size_t i = w; i < states.size(); i += jobs)
                    engine.continuable(states[i]);
                stats[w] = local.stats();
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    SolverStats total;
    for (const auto& s : stats)
        total += s;
    return total;
}

} // namespace

SoundnessReport check_sound(const Dpn& dpn, const CheckConfig& config, SmtGateway& gateway)
{
    const auto started = std::chrono::steady_clock::now();
    SoundnessReport report;
    report.net = dpn.id;
    const SolverStats before = gateway.stats();
    SolverStats workers;

    auto dds = std::make_shared<const Dds>(dpn_to_dds(dpn, config.bound));
    report.dds = dds;
    report.dds_size = {dds->states.size(), dds->edges.size()};

    CgOptions options{config.budget, config.order};
    try {
        SymbolicEngine engine(*dds, gateway, options);
        auto cg = std::make_shared<const ConstraintGraph>(engine.build(dds->initial, CgMode::Main));
        report.cg = cg;
        report.cg_size = {cg->nodes.size(), cg->edges.size()};

        auto done = [&] { return config.short_circuit && !report.violations.empty(); };

        for (std::size_t n : bad_termination(*cg, *dds, dpn)) {
            Violation v{Property::P2, n, std::nullopt, std::nullopt, {}};
            v.witness = extract_witness(dpn, *dds, *cg, n, Constraint::truth(), gateway);
            report.violations.push_back(std::move(v));
            if (config.short_circuit)
                break;
        }

        if (!done()) {
            auto dead = dead_transitions(*cg, dpn);
            if (!dead.empty())
                report.violations.push_back({Property::P3, std::nullopt, std::nullopt, std::nullopt, std::move(dead)});
        }

        if (!done()) {
            if (config.jobs > 1) {
                std::set<std::size_t> states;
                for (const auto& node : cg->nodes)
                    if (!dds->is_final(node.state))
                        states.insert(node.state);
                workers = precompute_continuations(*dds, {states.begin(), states.end()}, gateway, options,
                                                   engine.memo(), config.jobs);
            }
            for (auto& hit : blocked_states(*cg, engine, !config.short_circuit)) {
                Violation v{Property::P1, hit.node, hit.formula, std::nullopt, {}};
                v.witness = extract_witness(dpn, *dds, *cg, hit.node, hit.formula, gateway);
                report.violations.push_back(std::move(v));
            }
        }

        report.sound = report.violations.empty();
        if (!report.violations.empty()) {
            const Violation& first = report.violations.front();
            report.violated = first.property;
            report.witness = first.witness;
        }
        for (const auto& v : report.violations)
            if (v.property == Property::P3)
                report.dead_transitions = v.dead_transitions;
    } catch (const BudgetExceeded& e) {
        report.sound.reset();
        report.violated.reset();
        report.witness.reset();
        report.violations.clear();
        report.error = e.what();
    } catch (const Inconclusive& e) {
        report.sound.reset();
        report.violated.reset();
        report.witness.reset();
        report.violations.clear();
        report.error = e.what();
    }
    report.stats = delta(gateway.stats(), before);
    report.stats += workers;
    report.elapsed = std::chrono::steady_clock::now() - started;
    return report;
}

} // namespace dpnsound

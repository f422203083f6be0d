#include "dpnsound/constraint_graph.hpp"

#include "dpnsound/errors.hpp"

#include <algorithm>
#include <deque>

namespace dpnsound {

std::vector<std::size_t> ConstraintGraph::by_depth() const
{
    std::vector<std::size_t> ids(nodes.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = i;
    std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return nodes[a].depth < nodes[b].depth; });
    return ids;
}

std::vector<std::size_t> path_to_node(const ConstraintGraph& cg, std::size_t node)
{
    std::vector<std::size_t> path;
    std::size_t cur = node;
    while (auto e = cg.nodes.at(cur).parent_edge) {
        path.push_back(*e);
        cur = cg.edges[*e].source;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// ---------------------------------------------------------------------------

std::optional<std::vector<Constraint>> FinalMemo::find_final(std::size_t state)
{
    std::lock_guard lock(mutex_);
    auto it = final_.find(state);
    if (it == final_.end())
        return std::nullopt;
    return it->second;
}

void FinalMemo::store_final(std::size_t state, std::vector<Constraint> formulas)
{
    std::lock_guard lock(mutex_);
    final_.insert_or_assign(state, std::move(formulas));
}

std::optional<Constraint> FinalMemo::find_continuable(std::size_t state)
{
    std::lock_guard lock(mutex_);
    auto it = continuable_.find(state);
    if (it == continuable_.end())
        return std::nullopt;
    return it->second;
}

void FinalMemo::store_continuable(std::size_t state, Constraint formula)
{
    std::lock_guard lock(mutex_);
    continuable_.insert_or_assign(state, std::move(formula));
}

// ---------------------------------------------------------------------------

SymbolicEngine::SymbolicEngine(const Dds& dds, SmtGateway& gateway, CgOptions options, std::shared_ptr<FinalMemo> memo)
    : dds_(dds), gateway_(gateway), options_(options), memo_(std::move(memo))
{
    if (!memo_)
        memo_ = std::make_shared<FinalMemo>();
}

Constraint SymbolicEngine::update(const Constraint& phi, const std::string& transition)
{
    const Constraint& guard = dds_.guards.at(transition);
    std::set<Var> written = write_vars(guard);

    // Only written variables change, so only their old values need a quantified copy.
    Substitution old_values;
    Substitution guard_sub;
    std::vector<Var> fresh;
    for (const auto& v : dds_.variables) {
        Var p = v.plain();
        if (written.contains(p)) {
            Var u = p.copy("u");
            fresh.push_back(u);
            old_values.emplace(p, u);
            guard_sub.emplace(p.read(), u);
            guard_sub.emplace(p.written(), p);
        } else {
            guard_sub.emplace(p.read(), p);
        }
    }
    Constraint body = rename(phi, old_values) && rename(guard, guard_sub);
    if (fresh.empty())
        return gateway_.simplify(body);
    return gateway_.simplify(gateway_.qe(fresh, body));
}

namespace {

// Evaluates c under `model`, reading unbound variables as their sort's zero.  A model of a
// formula stays a model when variables it does not mention are added.
bool holds(const Constraint& c, const Assignment& model)
{
    Assignment full = model;
    for (const auto& v : free_vars(c))
        if (!full.contains(v))
            full.set(v, zero_value(v.sort));
    return evaluate(c, full);
}

} // namespace

ConstraintGraph SymbolicEngine::build(std::size_t start, CgMode mode)
{
    ConstraintGraph cg;
    cg.mode = mode;
    cg.start_state = start;
    Constraint init = mode == CgMode::Main ? assignment_formula(dds_.initial_assignment)
                                           : placeholder_formula(dds_.variables);
    cg.nodes.push_back({start, init, std::nullopt, 0});
    // One model per node: a model of one formula that falsifies the other refutes
    // equivalence without a solver call.  All zeros satisfy the placeholder start formula.
    std::vector<Assignment> models(1);
    if (mode == CgMode::Main)
        for (const auto& v : dds_.variables)
            models[0].set(v.plain(), dds_.initial_assignment.at(v));

    std::map<std::size_t, std::vector<std::size_t>> at_state{{start, {0}}};
    std::deque<std::size_t> work{0};
    while (!work.empty()) {
        std::size_t n;
        if (options_.order == ExplorationOrder::Bfs) {
            n = work.front();
            work.pop_front();
        } else {
            n = work.back();
            work.pop_back();
        }
        const std::size_t state = cg.nodes[n].state;
        const Constraint phi = cg.nodes[n].formula;
        const std::size_t depth = cg.nodes[n].depth;

        for (std::size_t e : dds_.outgoing[state]) {
            const DdsEdge& edge = dds_.edges[e];
            Constraint psi = update(phi, edge.transition);
            if (psi.is_false())
                continue;
            SatResult sat = gateway_.is_sat(psi);
            if (sat.unknown())
                throw Inconclusive("satisfiability of an update is unknown: " + sat.reason);
            if (sat.unsat())
                continue;

            std::optional<std::size_t> match;
            auto& candidates = at_state[edge.target];
            for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
                const Constraint& other = cg.nodes[*it].formula;
                if (!holds(other, sat.model) || !holds(psi, models[*it]))
                    continue;
                if (gateway_.equivalent(other, psi)) {
                    match = *it;
                    break;
                }
            }
            std::size_t edge_id = cg.edges.size();
            if (!match) {
                if (cg.nodes.size() >= options_.budget)
                    throw BudgetExceeded("constraint graph from " + dds_.state_name(start) + " exceeds "
                                         + std::to_string(options_.budget)
                                         + " nodes; the net possibly has no finite history set");
                match = cg.nodes.size();
                cg.nodes.push_back({edge.target, psi, edge_id, depth + 1});
                models.push_back(sat.model);
                candidates.push_back(*match);
                work.push_back(*match);
            }
            cg.edges.push_back({n, edge.transition, edge.action, *match});
        }
    }
    return cg;
}

const std::vector<Constraint>& SymbolicEngine::final_formulas(std::size_t state)
{
    if (auto it = local_final_.find(state); it != local_final_.end())
        return it->second;
    std::vector<Constraint> formulas;
    if (auto shared = memo_->find_final(state)) {
        formulas = std::move(*shared);
    } else {
        ConstraintGraph cg = build(state, CgMode::Placeholder);
        for (const auto& node : cg.nodes)
            if (dds_.is_final(node.state))
                formulas.push_back(node.formula);
        memo_->store_final(state, formulas);
    }
    return local_final_.emplace(state, std::move(formulas)).first->second;
}

Constraint SymbolicEngine::continuable(std::size_t state)
{
    if (auto hit = memo_->find_continuable(state))
        return *hit;
    std::vector<Var> plain;
    for (const auto& v : dds_.variables)
        plain.push_back(v.plain());
    Constraint any_final = Constraint::disj(final_formulas(state));
    Constraint psi = gateway_.simplify(gateway_.qe(plain, any_final));
    memo_->store_continuable(state, psi);
    return psi;
}

Constraint SymbolicEngine::blocked(std::size_t state, const Constraint& phi)
{
    Constraint lifted = reannotate(phi, Annotation::Plain, Annotation::Placeholder);
    return lifted && !continuable(state);
}

} // namespace dpnsound

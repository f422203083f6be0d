#include "dpnsound/oracle.hpp"

#include "dpnsound/errors.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dpnsound {

namespace {

std::vector<Value> default_values(Sort sort)
{
    std::vector<Value> out;
    switch (sort) {
    case Sort::Bool:
        out = {false, true};
        break;
    case Sort::Int:
        for (int i = -3; i <= 3; ++i)
            out.emplace_back(Rational(i));
        break;
    case Sort::Rat:
        for (const char* s : {"-2", "-1", "-1/2", "0", "1/2", "1", "2"})
            out.emplace_back(parse_rational(s));
        break;
    }
    return out;
}

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<Value> parse_values(const std::string& text, Sort sort)
{
    std::vector<Value> out;
    if (auto dots = text.find(".."); dots != std::string::npos) {
        Rational lo = parse_rational(trim(text.substr(0, dots)));
        Rational hi = parse_rational(trim(text.substr(dots + 2)));
        if (!is_integral(lo) || !is_integral(hi))
            throw std::invalid_argument("range bounds must be integers: " + text);
        for (Rational v = lo; v <= hi; v += 1)
            out.emplace_back(v);
    } else {
        std::istringstream in(text);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty())
                continue;
            if (sort == Sort::Bool) {
                if (item != "true" && item != "false")
                    throw std::invalid_argument("not a boolean: " + item);
                out.emplace_back(item == "true");
            } else {
                out.emplace_back(parse_rational(item));
            }
        }
    }
    if (sort == Sort::Int)
        for (const auto& v : out)
            if (!is_integral(std::get<Rational>(v)))
                throw std::invalid_argument("non-integral value in an int domain: " + text);
    if (out.empty())
        throw std::invalid_argument("empty domain: " + text);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

DomainBox DomainBox::defaults(const Dpn& dpn)
{
    DomainBox box;
    for (const auto& v : dpn.variables)
        box.values[v.name] = default_values(v.sort);
    return box;
}

DomainBox DomainBox::parse(const std::string& spec, const Dpn& dpn)
{
    DomainBox box = defaults(dpn);
    std::map<std::string, std::string> by_sort;
    std::map<std::string, std::string> by_var;
    std::istringstream in(spec);
    std::string entry;
    while (std::getline(in, entry, ';')) {
        entry = trim(entry);
        if (entry.empty())
            continue;
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("box entry without '=': " + entry);
        std::string key = trim(entry.substr(0, eq));
        std::string val = trim(entry.substr(eq + 1));
        if (parse_sort(key) && !dpn.variable(key))
            by_sort[key] = val;
        else if (dpn.variable(key))
            by_var[key] = val;
        else
            throw std::invalid_argument("box entry for unknown variable or sort: " + key);
    }
    for (const auto& v : dpn.variables) {
        for (const auto& [s, text] : by_sort)
            if (parse_sort(s) == v.sort)
                box.values[v.name] = parse_values(text, v.sort);
        if (auto it = by_var.find(v.name); it != by_var.end())
            box.values[v.name] = parse_values(it->second, v.sort);
    }
    return box;
}

const std::vector<Value>& DomainBox::of(const Var& v) const
{
    auto it = values.find(v.name);
    if (it == values.end())
        throw UnboundVariable("no domain for variable " + v.name);
    return it->second;
}

bool DomainBox::contains(const Var& v, const Value& value) const
{
    const auto& vals = of(v);
    return std::find(vals.begin(), vals.end(), value) != vals.end();
}

std::optional<std::size_t> ExplicitGraph::find(const DpnState& s) const
{
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == s)
            return i;
    return std::nullopt;
}

namespace {

struct StateKey {
    Marking marking;
    std::vector<Value> values;
    friend auto operator<=>(const StateKey&, const StateKey&) = default;
};

StateKey key_of(const Dpn& dpn, const DpnState& s)
{
    StateKey k{s.marking, {}};
    for (const auto& v : dpn.variables)
        k.values.push_back(s.assignment.at(v));
    return k;
}

} // namespace

ExplicitGraph enumerate_state_space(const Dpn& dpn, const DomainBox& box, unsigned k, std::optional<DpnState> start,
                                    std::size_t cap)
{
    ExplicitGraph g;
    DpnState init = start.value_or(DpnState{dpn.initial_marking, dpn.initial_assignment});
    for (const auto& v : dpn.variables)
        if (!box.contains(v, init.assignment.at(v)))
            throw std::invalid_argument("start value of " + v.name + " lies outside the box");

    std::map<StateKey, std::size_t> index;
    std::deque<std::size_t> work;
    auto intern = [&](DpnState s) {
        auto [it, inserted] = index.emplace(key_of(dpn, s), g.states.size());
        if (inserted) {
            if (g.states.size() >= cap)
                throw ExplosionGuard("explicit state space exceeds " + std::to_string(cap) + " states");
            g.states.push_back(std::move(s));
            g.outgoing.emplace_back();
            work.push_back(it->second);
        }
        return it->second;
    };
    intern(init);

    struct Prepared {
        const Transition* t;
        Marking pre;
        Marking post;
        std::vector<Var> written;
    };
    std::vector<Prepared> prepared;
    for (const auto& t : dpn.transitions) {
        auto w = write_vars(t.guard);
        prepared.push_back({&t, dpn.preset(t), dpn.postset(t), {w.begin(), w.end()}});
    }

    while (!work.empty()) {
        std::size_t s = work.front();
        work.pop_front();
        for (const auto& p : prepared) {
            const DpnState current = g.states[s];
            if (!current.marking.covers(p.pre))
                continue;
            Marking next_marking = current.marking;
            for (const auto& [pl, n] : p.pre.tokens())
                next_marking.set(pl, current.marking[pl] - n);
            for (const auto& [pl, n] : p.post.tokens())
                next_marking.add(pl, n);
            if (next_marking.max_tokens() > k)
                throw BoundExceeded("transition '" + p.t->id + "' exceeds the bound " + std::to_string(k));

            // odometer over the written variables' domains
            std::vector<std::size_t> digits(p.written.size(), 0);
            for (;;) {
                Assignment written;
                for (std::size_t i = 0; i < p.written.size(); ++i)
                    written.set(p.written[i].written(), box.of(p.written[i])[digits[i]]);
                Assignment beta = make_beta(dpn, current, *p.t, written);
                if (evaluate(p.t->guard, beta)) {
                    DpnState next{next_marking, current.assignment};
                    for (const auto& v : p.written)
                        next.assignment.set(v, beta.at(v.written()));
                    std::size_t target = intern(std::move(next));
                    g.outgoing[s].push_back(g.edges.size());
                    g.edges.push_back({s, TransitionFiring{p.t->id, std::move(beta)}, target});
                }
                std::size_t i = 0;
                while (i < digits.size()) {
                    if (++digits[i] < box.of(p.written[i]).size())
                        break;
                    digits[i] = 0;
                    ++i;
                }
                if (i == digits.size())
                    break;
            }
        }
    }
    return g;
}

std::vector<bool> coreachable(const ExplicitGraph& graph, const Marking& final_marking)
{
    std::vector<std::vector<std::size_t>> incoming(graph.states.size());
    for (const auto& e : graph.edges)
        incoming[e.target].push_back(e.source);
    std::vector<bool> mark(graph.states.size(), false);
    std::deque<std::size_t> work;
    for (std::size_t i = 0; i < graph.states.size(); ++i) {
        if (graph.states[i].marking == final_marking) {
            mark[i] = true;
            work.push_back(i);
        }
    }
    while (!work.empty()) {
        std::size_t s = work.front();
        work.pop_front();
        for (std::size_t p : incoming[s]) {
            if (!mark[p]) {
                mark[p] = true;
                work.push_back(p);
            }
        }
    }
    return mark;
}

OracleVerdict oracle_soundness(const Dpn& dpn, const DomainBox& box, unsigned k, std::size_t cap)
{
    OracleVerdict v;
    v.graph = enumerate_state_space(dpn, box, k, std::nullopt, cap);
    const auto& g = v.graph;

    for (std::size_t i = 0; i < g.states.size(); ++i) {
        const Marking& m = g.states[i].marking;
        if (m.covers(dpn.final_marking) && m != dpn.final_marking)
            v.bad_states.push_back(i);
    }
    std::set<std::string> fired;
    for (const auto& e : g.edges)
        fired.insert(e.firing.transition);
    for (const auto& t : dpn.transitions)
        if (!fired.contains(t.id))
            v.dead_transitions.push_back(t.id);
    auto co = coreachable(g, dpn.final_marking);
    for (std::size_t i = 0; i < g.states.size(); ++i)
        if (!co[i])
            v.blocked_states.push_back(i);

    if (!v.bad_states.empty())
        v.violated = Property::P2;
    else if (!v.dead_transitions.empty())
        v.violated = Property::P3;
    else if (!v.blocked_states.empty())
        v.violated = Property::P1;
    v.sound = !v.violated.has_value();
    return v;
}

} // namespace dpnsound

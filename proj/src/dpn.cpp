#include "dpnsound/dpn.hpp"

#include "dpnsound/errors.hpp"
#include "dpnsound/guard_parser.hpp"
#include "dpnsound/smt.hpp"

#include <algorithm>
#include <set>

namespace dpnsound {

Marking::Marking(std::initializer_list<std::pair<const std::string, unsigned>> tokens)
{
    for (const auto& [p, n] : tokens)
        add(p, n);
}

unsigned Marking::operator[](const std::string& place) const
{
    auto it = tokens_.find(place);
    return it == tokens_.end() ? 0 : it->second;
}

void Marking::set(const std::string& place, unsigned count)
{
    if (count == 0)
        tokens_.erase(place);
    else
        tokens_[place] = count;
}

unsigned Marking::total() const
{
    unsigned sum = 0;
    for (const auto& [p, n] : tokens_)
        sum += n;
    return sum;
}

unsigned Marking::max_tokens() const
{
    unsigned m = 0;
    for (const auto& [p, n] : tokens_)
        m = std::max(m, n);
    return m;
}

bool Marking::covers(const Marking& other) const
{
    return std::all_of(other.tokens_.begin(), other.tokens_.end(),
                       [&](const auto& entry) { return (*this)[entry.first] >= entry.second; });
}

std::string to_string(const Marking& m)
{
    std::string out = "{";
    bool first = true;
    for (const auto& [p, n] : m.tokens()) {
        if (!first)
            out += ", ";
        first = false;
        if (n != 1)
            out += std::to_string(n) + "*";
        out += p;
    }
    return out + "}";
}

// ---------------------------------------------------------------------------

const Transition* Dpn::find_transition(const std::string& id) const
{
    for (const auto& t : transitions)
        if (t.id == id)
            return &t;
    return nullptr;
}

const Transition& Dpn::transition(const std::string& id) const
{
    if (const Transition* t = find_transition(id))
        return *t;
    throw UnknownReference("unknown transition '" + id + "'");
}

bool Dpn::has_place(const std::string& id) const
{
    return std::any_of(places.begin(), places.end(), [&](const Place& p) { return p.id == id; });
}

std::optional<Var> Dpn::variable(const std::string& name) const
{
    for (const auto& v : variables)
        if (v.name == name)
            return v;
    return std::nullopt;
}

std::map<std::string, Sort> Dpn::declared() const
{
    std::map<std::string, Sort> out;
    for (const auto& v : variables)
        out.emplace(v.name, v.sort);
    return out;
}

Marking Dpn::preset(const Transition& t) const
{
    Marking m;
    for (const auto& [edge, w] : flow)
        if (edge.second == t.id && has_place(edge.first))
            m.add(edge.first, w);
    return m;
}

Marking Dpn::postset(const Transition& t) const
{
    Marking m;
    for (const auto& [edge, w] : flow)
        if (edge.first == t.id && has_place(edge.second))
            m.add(edge.second, w);
    return m;
}

// ---------------------------------------------------------------------------

bool tokens_suffice(const Dpn& dpn, const Marking& m, const Transition& t)
{
    return m.covers(dpn.preset(t));
}

Assignment make_beta(const Dpn& dpn, const DpnState& s, const Transition& t, const Assignment& written)
{
    Assignment beta;
    for (const auto& v : dpn.variables)
        beta.set(v.read(), s.assignment.at(v));
    for (const auto& v : write_vars(t.guard)) {
        Var w = v.written();
        if (written.contains(w))
            beta.set(w, written.at(w));
        else if (written.contains(v))
            beta.set(w, written.at(v));
        else
            beta.set(w, s.assignment.at(v));
    }
    return beta;
}

std::optional<TransitionFiring> enabled_firing(const Dpn& dpn, const DpnState& s, const std::string& transition,
                                               SmtGateway& gateway)
{
    const Transition& t = dpn.transition(transition);
    if (!tokens_suffice(dpn, s.marking, t))
        return std::nullopt;

    std::set<Var> written = write_vars(t.guard);
    if (written.empty()) {
        Assignment beta = make_beta(dpn, s, t, {});
        if (!evaluate(t.guard, beta))
            return std::nullopt;
        return TransitionFiring{t.id, std::move(beta)};
    }

    // Fix the reads to the current values and let the solver choose the writes.
    Substitution sub;
    for (const auto& v : read_vars(t.guard)) {
        Var r = v.read();
        if (v.sort == Sort::Bool)
            continue;
        sub.emplace(r, LinTerm(s.assignment.number(v)));
    }
    std::vector<Constraint> fixed{rename(t.guard, sub)};
    for (const auto& v : read_vars(t.guard)) {
        if (v.sort != Sort::Bool)
            continue;
        Constraint b = Constraint::bool_var(v.read());
        fixed.push_back(s.assignment.boolean(v) ? b : !b);
    }
    SatResult r = gateway.is_sat(Constraint::conj(std::move(fixed)));
    if (r.unknown())
        throw Inconclusive("enabledness of '" + t.id + "' is unknown: " + r.reason);
    if (r.unsat())
        return std::nullopt;
    Assignment chosen;
    for (const auto& v : written) {
        Var w = v.written();
        chosen.set(w, r.model.contains(w) ? r.model.at(w) : zero_value(v.sort));
    }
    return TransitionFiring{t.id, make_beta(dpn, s, t, chosen)};
}

DpnState fire(const Dpn& dpn, const DpnState& s, const TransitionFiring& f)
{
    const Transition* t = dpn.find_transition(f.transition);
    if (t == nullptr)
        throw NotEnabled("unknown transition '" + f.transition + "'");
    Marking pre = dpn.preset(*t);
    if (!s.marking.covers(pre))
        throw NotEnabled("transition '" + t->id + "' lacks tokens in " + to_string(s.marking));
    for (const auto& [v, value] : f.beta) {
        if (v.annotation != Annotation::Read)
            continue;
        if (!s.assignment.contains(v.plain()) || s.assignment.at(v.plain()) != value)
            throw NotEnabled("firing of '" + t->id + "' reads " + v.name + "=" + to_string(value)
                             + " but the state holds another value");
    }
    bool ok = false;
    try {
        ok = evaluate(t->guard, f.beta);
    } catch (const UnboundVariable& e) {
        throw NotEnabled("firing of '" + t->id + "' is incomplete: " + e.what());
    }
    if (!ok)
        throw NotEnabled("guard of '" + t->id + "' is false under the firing");

    DpnState next;
    next.marking = s.marking;
    for (const auto& [p, n] : pre.tokens())
        next.marking.set(p, s.marking[p] - n);
    const Marking post = dpn.postset(*t);
    for (const auto& [p, n] : post.tokens())
        next.marking.add(p, n);
    next.assignment = s.assignment;
    for (const auto& v : write_vars(t->guard))
        next.assignment.set(v, f.beta.at(v.written()));
    return next;
}

// ---------------------------------------------------------------------------

std::string to_string(const Diagnostic& d)
{
    return d.kind + " " + d.element + ": " + d.message;
}

std::vector<Diagnostic> validate(const Dpn& dpn)
{
    std::vector<Diagnostic> out;
    if (dpn.places.empty())
        out.push_back({"EmptyNet", dpn.id, "net has no places"});
    if (dpn.transitions.empty())
        out.push_back({"EmptyNet", dpn.id, "net has no transitions"});

    std::set<std::string> ids;
    for (const auto& p : dpn.places)
        if (!ids.insert(p.id).second)
            out.push_back({"IdClash", p.id, "duplicate id"});
    for (const auto& t : dpn.transitions)
        if (!ids.insert(t.id).second)
            out.push_back({"IdClash", t.id, "duplicate id"});

    std::set<std::string> place_ids;
    for (const auto& p : dpn.places)
        place_ids.insert(p.id);
    std::set<std::string> transition_ids;
    for (const auto& t : dpn.transitions)
        transition_ids.insert(t.id);

    for (const auto& [edge, w] : dpn.flow) {
        const auto& [src, dst] = edge;
        bool ok = (place_ids.contains(src) && transition_ids.contains(dst))
                  || (transition_ids.contains(src) && place_ids.contains(dst));
        if (!ok)
            out.push_back({"UnknownReference", src + "->" + dst, "arc must connect a place and a transition"});
        if (w == 0)
            out.push_back({"InvalidArc", src + "->" + dst, "zero multiplicity"});
    }

    for (const auto* m : {&dpn.initial_marking, &dpn.final_marking})
        for (const auto& [p, n] : m->tokens())
            if (!place_ids.contains(p))
                out.push_back({"UnknownReference", p, "marking refers to an unknown place"});

    std::set<std::string> names;
    for (const auto& v : dpn.variables) {
        if (!names.insert(v.name).second)
            out.push_back({"IdClash", v.name, "variable declared twice"});
        if (v.annotation != Annotation::Plain)
            out.push_back({"SortMismatch", v.name, "process variables must be unannotated"});
        if (!dpn.initial_assignment.contains(v)) {
            out.push_back({"UnboundVariable", v.name, "no initial value"});
            continue;
        }
        const Value& value = dpn.initial_assignment.at(v);
        bool typed = v.sort == Sort::Bool ? std::holds_alternative<bool>(value)
                                          : std::holds_alternative<Rational>(value)
                                                && (v.sort == Sort::Rat || is_integral(std::get<Rational>(value)));
        if (!typed)
            out.push_back({"SortMismatch", v.name, "initial value " + to_string(value) + " does not fit its sort"});
    }

    auto declared = dpn.declared();
    for (const auto& t : dpn.transitions) {
        for (const auto& v : free_vars(t.guard)) {
            auto it = declared.find(v.name);
            if (it == declared.end())
                out.push_back({"UndeclaredVariable", t.id, "guard mentions undeclared variable " + v.name});
            else if (it->second != v.sort)
                out.push_back({"SortMismatch", t.id, "guard uses " + v.name + " with the wrong sort"});
            if (v.annotation != Annotation::Read && v.annotation != Annotation::Written)
                out.push_back({"SortMismatch", t.id, "guard variable " + v.name + " is neither read nor written"});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

DpnBuilder::DpnBuilder(std::string id)
{
    dpn_.id = std::move(id);
}

DpnBuilder& DpnBuilder::place(const std::string& id, unsigned initial, unsigned final)
{
    dpn_.places.push_back({id, id});
    dpn_.initial_marking.add(id, initial);
    dpn_.final_marking.add(id, final);
    return *this;
}

DpnBuilder& DpnBuilder::variable(const std::string& name, Sort sort, std::optional<Value> initial)
{
    Var v{name, sort, Annotation::Plain};
    dpn_.variables.push_back(v);
    dpn_.initial_assignment.set(v, initial.value_or(zero_value(sort)));
    return *this;
}

DpnBuilder& DpnBuilder::transition(const std::string& id, const std::string& guard, const std::string& label)
{
    dpn_.transitions.push_back({id, label.empty() ? id : label, Constraint::truth()});
    guards_.emplace_back(id, guard);
    return *this;
}

DpnBuilder& DpnBuilder::arc(const std::string& source, const std::string& target, unsigned weight)
{
    arcs_.emplace_back(source, target, weight);
    return *this;
}

Dpn DpnBuilder::build() const
{
    Dpn dpn = dpn_;
    auto declared = dpn.declared();
    for (std::size_t i = 0; i < guards_.size(); ++i)
        dpn.transitions[i].guard = parse_guard(guards_[i].second, declared);
    for (const auto& [src, dst, w] : arcs_) {
        bool src_known = dpn.has_place(src) || dpn.find_transition(src) != nullptr;
        bool dst_known = dpn.has_place(dst) || dpn.find_transition(dst) != nullptr;
        if (!src_known)
            throw UnknownReference("arc source '" + src + "' is not declared");
        if (!dst_known)
            throw UnknownReference("arc target '" + dst + "' is not declared");
        dpn.flow[{src, dst}] += w;
    }
    auto diags = validate(dpn);
    if (!diags.empty()) {
        std::string msg = "invalid net '" + dpn.id + "':";
        for (const auto& d : diags)
            msg += "\n  " + to_string(d);
        throw InvalidModel(msg);
    }
    return dpn;
}

} // namespace dpnsound

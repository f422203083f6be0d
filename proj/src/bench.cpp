#include "dpnsound/bench.hpp"

#include <set>

namespace dpnsound {

namespace {

std::string fresh_id(const Dpn& dpn, const std::set<std::string>& taken, const std::string& base)
{
    std::string id = base;
    for (int i = 1; taken.contains(id) || dpn.has_place(id) || dpn.find_transition(id) != nullptr; ++i)
        id = base + "_" + std::to_string(i);
    return id;
}

} // namespace

Dpn add_sequential_states(const Dpn& dpn, std::size_t n)
{
    if (n == 0)
        return dpn;
    Dpn out = dpn;
    std::set<std::string> taken;
    std::vector<std::string> places;
    for (std::size_t i = 1; i <= n; ++i) {
        std::string p = fresh_id(dpn, taken, "seq_q" + std::to_string(i));
        taken.insert(p);
        places.push_back(p);
        out.places.push_back({p, p});
    }
    for (std::size_t i = 1; i <= n; ++i) {
        std::string t = fresh_id(dpn, taken, "seq_t" + std::to_string(i));
        taken.insert(t);
        out.transitions.push_back({t, t, Constraint::truth()});
        out.flow[{places[i - 1], t}] += 1;
        if (i < n) {
            out.flow[{t, places[i]}] += 1;
        } else {
            for (const auto& [p, count] : dpn.initial_marking.tokens())
                out.flow[{t, p}] += count;
        }
    }
    out.initial_marking = Marking{};
    out.initial_marking.set(places.front(), 1);
    return out;
}

Dpn add_chained_vars(const Dpn& dpn, std::size_t k, Op chain)
{
    if (k == 0)
        return dpn;
    Dpn out = dpn;
    std::set<std::string> names;
    for (const auto& v : dpn.variables)
        names.insert(v.name);
    std::map<std::string, Var> created;

    auto chain_var = [&](Sort sort, std::size_t index) {
        std::string base = std::string(sort == Sort::Int ? "z_int_" : "z_rat_") + std::to_string(index);
        auto it = created.find(base);
        if (it != created.end())
            return it->second;
        std::string name = base;
        for (int i = 1; names.contains(name); ++i)
            name = base + "_" + std::to_string(i);
        names.insert(name);
        Var v{name, sort, Annotation::Plain};
        out.variables.push_back(v);
        out.initial_assignment.set(v, Rational(0));
        created.emplace(base, v);
        return v;
    };

    for (auto& t : out.transitions) {
        std::vector<Constraint> conjuncts;
        if (const auto* a = std::get_if<AndNode>(&t.guard.node().value))
            conjuncts = a->children;
        else
            conjuncts.push_back(t.guard);

        std::vector<Constraint> rewritten;
        std::size_t atom_index = 0;
        for (const auto& c : conjuncts) {
            const auto* atom = std::get_if<AtomNode>(&c.node().value);
            if (atom == nullptr) {
                rewritten.push_back(c);
                continue;
            }
            Sort sort = (atom->lhs.sort() == Sort::Rat || atom->rhs.sort() == Sort::Rat) ? Sort::Rat : Sort::Int;
            std::vector<Var> zs;
            for (std::size_t i = 1; i <= k; ++i)
                zs.push_back(chain_var(sort, atom_index * k + i).written());
            ++atom_index;
            rewritten.push_back(Constraint::atom(atom->lhs, Op::Eq, zs.front()));
            for (std::size_t i = 0; i + 1 < zs.size(); ++i)
                rewritten.push_back(Constraint::atom(zs[i], chain, zs[i + 1]));
            rewritten.push_back(Constraint::atom(zs.back(), atom->op, atom->rhs));
        }
        t.guard = Constraint::conj(std::move(rewritten));
    }
    return out;
}

} // namespace dpnsound

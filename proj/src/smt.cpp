#include "dpnsound/smt.hpp"

#include "dpnsound/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace dpnsound {

SolverConfig SolverConfig::from_environment()
{
    SolverConfig config;
    if (const char* exe = std::getenv("DPNSOUND_SOLVER"); exe != nullptr && *exe != '\0')
        config.executable = exe;
    if (const char* args = std::getenv("DPNSOUND_SOLVER_ARGS"); args != nullptr) {
        std::istringstream in(args);
        std::string a;
        while (in >> a)
            config.args.push_back(a);
    }
    if (const char* ms = std::getenv("DPNSOUND_TIMEOUT_MS"); ms != nullptr && *ms != '\0')
        config.timeout = std::chrono::milliseconds(std::strtoll(ms, nullptr, 10));
    return config;
}

SolverStats& SolverStats::operator+=(const SolverStats& other)
{
    sat_checks += other.sat_checks;
    qe_calls += other.qe_calls;
    equiv_checks += other.equiv_checks;
    cache_hits += other.cache_hits;
    elapsed += other.elapsed;
    return *this;
}

// ---------------------------------------------------------------------------
// QueryCache

std::optional<SatResult> QueryCache::find_sat(const std::string& key)
{
    std::lock_guard lock(mutex_);
    auto it = sat_.find(key);
    if (it == sat_.end())
        return std::nullopt;
    return it->second;
}

void QueryCache::store_sat(const std::string& key, const SatResult& result)
{
    std::lock_guard lock(mutex_);
    sat_.insert_or_assign(key, result);
}

std::optional<Constraint> QueryCache::find_qe(const std::string& key)
{
    std::lock_guard lock(mutex_);
    auto it = qe_.find(key);
    if (it == qe_.end())
        return std::nullopt;
    return it->second;
}

void QueryCache::store_qe(const std::string& key, const Constraint& result)
{
    std::lock_guard lock(mutex_);
    qe_.insert_or_assign(key, result);
}

std::optional<bool> QueryCache::find_equiv(const std::string& key)
{
    std::lock_guard lock(mutex_);
    auto it = equiv_.find(key);
    if (it == equiv_.end())
        return std::nullopt;
    return it->second;
}

void QueryCache::store_equiv(const std::string& key, bool result)
{
    std::lock_guard lock(mutex_);
    equiv_.insert_or_assign(key, result);
}

// ---------------------------------------------------------------------------
// Gateway

namespace {

std::string declarations(const std::set<Var>& vars)
{
    std::string out;
    for (const auto& v : vars)
        out += "(declare-const " + smt_symbol(v) + " " + smt_sort(v.sort) + ")\n";
    return out;
}

std::map<std::string, Var> symbol_table(const std::set<Var>& vars)
{
    std::map<std::string, Var> out;
    for (const auto& v : vars) {
        std::string sym = smt_symbol(v);
        out.emplace(sym.substr(1, sym.size() - 2), v);
    }
    return out;
}

bool has_error(const std::string& reply)
{
    return reply.find("(error") != std::string::npos;
}

Value read_value(const SExpr& e, Sort sort)
{
    if (sort == Sort::Bool) {
        if (e.is("true"))
            return true;
        if (e.is("false"))
            return false;
        throw SolverFailure("unreadable boolean model value: " + e.str());
    }
    if (e.is_atom) {
        try {
            return parse_rational(e.atom);
        } catch (const std::invalid_argument&) {
            throw SolverFailure("unreadable model value: " + e.atom);
        }
    }
    if (e.head() == "-" && e.list.size() == 2)
        return Rational(-std::get<Rational>(read_value(e.list[1], sort)));
    if (e.head() == "/" && e.list.size() == 3) {
        Rational n = std::get<Rational>(read_value(e.list[1], sort));
        Rational d = std::get<Rational>(read_value(e.list[2], sort));
        if (d == 0)
            throw SolverFailure("division by zero in model value");
        return Rational(n / d);
    }
    if (e.head() == "to_real" && e.list.size() == 2)
        return read_value(e.list[1], sort);
    throw SolverFailure("unreadable model value: " + e.str());
}

} // namespace

SmtGateway::SmtGateway(SolverConfig config, std::shared_ptr<QueryCache> cache)
    : config_(std::move(config)), cache_(std::move(cache))
{
    if (!cache_)
        cache_ = std::make_shared<QueryCache>();
    std::vector<std::string> args = config_.args;
    if (args.empty())
        args.push_back("-in");
    std::vector<std::string> prelude{
        "(set-option :print-success false)",
        "(set-option :produce-models true)",
        "(set-logic LIRA)",
        "(set-option :timeout " + std::to_string(config_.timeout.count()) + ")",
    };
    process_ = std::make_unique<SolverProcess>(config_.executable, std::move(args), std::move(prelude));
}

std::string SmtGateway::run(const std::string& commands, bool& timed_out)
{
    auto start = std::chrono::steady_clock::now();
    auto reply = process_->exchange(commands, config_.timeout + std::chrono::milliseconds(2000));
    stats_.elapsed += std::chrono::steady_clock::now() - start;
    timed_out = !reply.has_value();
    return reply.value_or("");
}

SatResult SmtGateway::is_sat(const Constraint& c)
{
    std::string key;
    if (config_.cache) {
        key = canonical(c);
        if (auto hit = cache_->find_sat(key)) {
            ++stats_.cache_hits;
            return *hit;
        }
    }
    ++stats_.sat_checks;

    SatResult result;
    if (c.is_true() || c.is_false()) {
        result.status = c.is_true() ? SatResult::Status::Sat : SatResult::Status::Unsat;
        if (config_.cache)
            cache_->store_sat(key, result);
        return result;
    }

    std::set<Var> vars = free_vars(c);
    std::string script = "(push 1)\n" + declarations(vars) + "(assert " + to_smtlib(c) + ")\n(check-sat)";
    bool timed_out = false;
    std::string reply = run(script, timed_out);
    if (timed_out) {
        result.reason = "solver timeout";
        return result;
    }
    if (has_error(reply)) {
        run("(pop 1)", timed_out);
        throw SolverFailure("solver rejected query: " + reply);
    }
    std::string status;
    std::istringstream(reply) >> status;

    if (status == "sat") {
        std::string names;
        for (const auto& v : vars)
            names += " " + smt_symbol(v);
        std::string values;
        bool values_timed_out = false;
        if (!vars.empty())
            values = run("(get-value (" + names + "))", values_timed_out);
        if (!values_timed_out)
            run("(pop 1)", timed_out);
        if (values_timed_out || timed_out)
            return SatResult{SatResult::Status::Unknown, {}, "solver timeout while reading the model"};
        if (has_error(values))
            throw SolverFailure("solver rejected get-value: " + values);
        result.status = SatResult::Status::Sat;
        if (!vars.empty()) {
            auto symbols = symbol_table(vars);
            auto parsed = parse_sexprs(values);
            if (parsed.size() != 1 || parsed[0].is_atom)
                throw SolverFailure("unexpected get-value reply: " + values);
            for (const auto& pair : parsed[0].list) {
                if (pair.is_atom || pair.list.size() != 2 || !pair.list[0].is_atom)
                    throw SolverFailure("unexpected get-value entry: " + pair.str());
                auto it = symbols.find(pair.list[0].atom);
                if (it == symbols.end())
                    throw SolverFailure("model mentions unknown symbol " + pair.list[0].atom);
                result.model.set(it->second, read_value(pair.list[1], it->second.sort));
            }
            bool quantified = false;
            bool holds = false;
            try {
                holds = evaluate(c, result.model);
            } catch (const UnboundVariable&) {
                throw SolverFailure("solver model is not total over the query");
            } catch (const Error&) {
                quantified = true;
            }
            if (!quantified && !holds)
                throw SolverFailure("solver model does not satisfy the query");
        }
    } else {
        run("(pop 1)", timed_out);
        if (status == "unsat") {
            result.status = SatResult::Status::Unsat;
        } else {
            result.reason = status.empty() ? "no answer" : status;
            return result;
        }
    }
    if (config_.cache)
        cache_->store_sat(key, result);
    return result;
}

Constraint SmtGateway::qe(const std::vector<Var>& vars, const Constraint& c)
{
    Constraint quantified = Constraint::exists(vars, c);
    if (quantified == c)
        return c; // nothing to eliminate

    std::string key;
    if (config_.cache) {
        key = canonical(quantified);
        if (auto hit = cache_->find_qe(key)) {
            ++stats_.cache_hits;
            return *hit;
        }
    }
    ++stats_.qe_calls;

    std::set<Var> free = free_vars(quantified);
    std::string script = "(push 1)\n" + declarations(free) + "(assert " + to_smtlib(quantified)
                         + ")\n(apply (try-for (then qe-light qe simplify) " + std::to_string(config_.timeout.count())
                         + "))";
    bool timed_out = false;
    std::string reply = run(script, timed_out);
    if (timed_out)
        throw Inconclusive("quantifier elimination timed out");
    run("(pop 1)", timed_out);
    if (has_error(reply)) {
        if (reply.find("canceled") != std::string::npos || reply.find("timeout") != std::string::npos)
            throw Inconclusive("quantifier elimination timed out");
        throw QENotSupported("solver could not eliminate quantifiers: " + reply);
    }

    auto parsed = parse_sexprs(reply);
    if (parsed.size() != 1 || parsed[0].head() != "goals")
        throw SolverFailure("unexpected apply reply: " + reply);
    auto symbols = symbol_table(free);
    std::vector<Constraint> goals;
    for (std::size_t i = 1; i < parsed[0].list.size(); ++i) {
        const SExpr& goal = parsed[0].list[i];
        if (goal.head() != "goal")
            throw SolverFailure("unexpected goal: " + goal.str());
        std::vector<Constraint> parts;
        for (std::size_t j = 1; j < goal.list.size(); ++j) {
            const SExpr& f = goal.list[j];
            if (f.is_atom && !f.atom.empty() && f.atom.front() == ':') {
                ++j; // keyword value
                continue;
            }
            parts.push_back(from_smtlib(f, symbols));
        }
        goals.push_back(Constraint::conj(std::move(parts)));
    }
    Constraint result = Constraint::disj(std::move(goals));
    if (config_.cache)
        cache_->store_qe(key, result);
    return result;
}

bool SmtGateway::equivalent(const Constraint& a, const Constraint& b)
{
    std::string ka = canonical(a);
    std::string kb = canonical(b);
    if (ka == kb)
        return true;
    std::string key = ka < kb ? ka + "\n" + kb : kb + "\n" + ka;
    if (config_.cache) {
        if (auto hit = cache_->find_equiv(key)) {
            ++stats_.cache_hits;
            return *hit;
        }
    }
    ++stats_.equiv_checks;
    Constraint differ = (a && !b) || (!a && b);
    SatResult r = is_sat(differ);
    if (r.unknown())
        throw Inconclusive("equivalence check returned unknown: " + r.reason);
    bool result = r.unsat();
    if (config_.cache)
        cache_->store_equiv(key, result);
    return result;
}

// ---------------------------------------------------------------------------
// simplify

namespace {

// p op c with p's first coefficient equal to 1.
struct Bound {
    LinTerm lhs;
    Op op;
    Rational rhs;
};

std::optional<Bound> normalize(const AtomNode& a)
{
    LinTerm d = a.lhs - a.rhs;
    if (d.is_constant())
        return std::nullopt;
    Rational f = d.coefficients().begin()->second;
    Rational c = -d.constant() / f;
    LinTerm p = (d - LinTerm(d.constant())) * Rational(Rational(1) / f);
    Op op = f > 0 ? a.op : swapped(a.op);
    return Bound{std::move(p), op, std::move(c)};
}

struct Group {
    LinTerm lhs;
    std::optional<std::pair<Rational, bool>> lower; // value, strict
    std::optional<std::pair<Rational, bool>> upper;
    std::optional<Rational> eq;
    std::vector<Rational> ne;
    bool conflict = false;
    std::vector<Constraint> originals;

    void add(const Bound& b)
    {
        const Rational& c = b.rhs;
        switch (b.op) {
        case Op::Eq:
            if (eq && *eq != c)
                conflict = true;
            eq = c;
            break;
        case Op::Ne:
            if (std::find(ne.begin(), ne.end(), c) == ne.end())
                ne.push_back(c);
            break;
        case Op::Ge:
        case Op::Gt: {
            bool strict = b.op == Op::Gt;
            if (!lower || c > lower->first || (c == lower->first && strict))
                lower = {c, strict};
            break;
        }
        case Op::Le:
        case Op::Lt: {
            bool strict = b.op == Op::Lt;
            if (!upper || c < upper->first || (c == upper->first && strict))
                upper = {c, strict};
            break;
        }
        }
    }

    bool admits(const Rational& v) const
    {
        if (lower && (v < lower->first || (v == lower->first && lower->second)))
            return false;
        if (upper && (v > upper->first || (v == upper->first && upper->second)))
            return false;
        return true;
    }

    // nullopt: the group is unsatisfiable
    std::optional<std::vector<Constraint>> emit() const
    {
        if (conflict)
            return std::nullopt;
        if (originals.size() == 1)
            return originals;
        std::vector<Constraint> out;
        if (eq) {
            if (!admits(*eq) || std::find(ne.begin(), ne.end(), *eq) != ne.end())
                return std::nullopt;
            out.push_back(Constraint::atom(lhs, Op::Eq, *eq));
            return out;
        }
        if (lower && upper) {
            if (lower->first > upper->first)
                return std::nullopt;
            if (lower->first == upper->first) {
                if (lower->second || upper->second)
                    return std::nullopt;
                if (std::find(ne.begin(), ne.end(), lower->first) != ne.end())
                    return std::nullopt;
                out.push_back(Constraint::atom(lhs, Op::Eq, lower->first));
                return out;
            }
        }
        if (lower)
            out.push_back(Constraint::atom(lhs, lower->second ? Op::Gt : Op::Ge, lower->first));
        if (upper)
            out.push_back(Constraint::atom(lhs, upper->second ? Op::Lt : Op::Le, upper->first));
        for (const auto& v : ne) {
            bool strictly_inside = (!lower || v > lower->first) && (!upper || v < upper->first);
            if (strictly_inside)
                out.push_back(Constraint::atom(lhs, Op::Ne, v));
        }
        // a disequality on a non-strict bound's endpoint tightens it
        for (auto& c : out) {
            const auto* a = std::get_if<AtomNode>(&c.node().value);
            if (a == nullptr)
                continue;
            const Rational& bound = a->rhs.constant();
            if ((a->op == Op::Ge || a->op == Op::Le) && std::find(ne.begin(), ne.end(), bound) != ne.end())
                c = Constraint::atom(a->lhs, a->op == Op::Ge ? Op::Gt : Op::Lt, a->rhs);
        }
        return out;
    }
};

Constraint simplify_local(const Constraint& c);

Constraint simplify_and(const AndNode& n)
{
    std::vector<Constraint> children;
    for (const auto& ch : n.children)
        children.push_back(simplify_local(ch));
    Constraint flat = Constraint::conj(children);
    const auto* an = std::get_if<AndNode>(&flat.node().value);
    if (an == nullptr)
        return flat;

    // order of first appearance: index into either groups or others
    std::vector<std::pair<bool, std::size_t>> order;
    std::vector<Group> groups;
    std::map<std::string, std::size_t> group_index;
    std::vector<Constraint> others;
    std::set<std::string> seen;

    for (const auto& ch : an->children) {
        std::string key = canonical(ch);
        if (!seen.insert(key).second)
            continue;
        const auto* atom = std::get_if<AtomNode>(&ch.node().value);
        std::optional<Bound> b = atom ? normalize(*atom) : std::nullopt;
        if (!b) {
            order.emplace_back(false, others.size());
            others.push_back(ch);
            continue;
        }
        std::string gkey = canonical(Constraint::atom(b->lhs, Op::Eq, 0));
        auto it = group_index.find(gkey);
        if (it == group_index.end()) {
            it = group_index.emplace(gkey, groups.size()).first;
            order.emplace_back(true, groups.size());
            groups.push_back(Group{b->lhs, {}, {}, {}, {}, false, {}});
        }
        groups[it->second].add(*b);
        groups[it->second].originals.push_back(ch);
    }

    std::vector<Constraint> out;
    for (const auto& [is_group, idx] : order) {
        if (!is_group) {
            const Constraint& o = others[idx];
            // absorption: a disjunction containing one of the conjuncts is redundant
            if (const auto* on = std::get_if<OrNode>(&o.node().value)) {
                bool absorbed = std::any_of(on->children.begin(), on->children.end(),
                                            [&](const Constraint& d) { return seen.contains(canonical(d)); });
                if (absorbed)
                    continue;
            }
            out.push_back(o);
            continue;
        }
        auto parts = groups[idx].emit();
        if (!parts)
            return Constraint::falsity();
        out.insert(out.end(), parts->begin(), parts->end());
    }
    return Constraint::conj(std::move(out));
}

Constraint simplify_or(const OrNode& n)
{
    std::vector<Constraint> out;
    std::set<std::string> seen;
    for (const auto& ch : n.children) {
        Constraint s = simplify_local(ch);
        if (s.is_true())
            return s;
        std::vector<Constraint> items;
        if (const auto* on = std::get_if<OrNode>(&s.node().value))
            items = on->children;
        else
            items.push_back(s);
        for (auto& item : items)
            if (seen.insert(canonical(item)).second)
                out.push_back(std::move(item));
    }
    // x op c || x negate(op) c
    for (const auto& item : out) {
        const auto* a = std::get_if<AtomNode>(&item.node().value);
        if (a != nullptr && seen.contains(canonical(Constraint::atom(a->lhs, negate(a->op), a->rhs))))
            return Constraint::truth();
    }
    return Constraint::disj(std::move(out));
}

Constraint simplify_local(const Constraint& c)
{
    return std::visit(
        [&](const auto& n) -> Constraint {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AndNode>)
                return simplify_and(n);
            else if constexpr (std::is_same_v<T, OrNode>)
                return simplify_or(n);
            else if constexpr (std::is_same_v<T, NotNode>)
                return Constraint::negation(simplify_local(n.child));
            else if constexpr (std::is_same_v<T, ExistsNode>)
                return Constraint::exists(n.vars, simplify_local(n.body));
            else
                return c;
        },
        c.node().value);
}

} // namespace

Constraint SmtGateway::simplify(const Constraint& c)
{
    Constraint out = simplify_local(c);
    if (config_.verify_simplify && !equivalent(c, out))
        throw SolverFailure("simplify changed the meaning of " + to_string(c));
    return out;
}

} // namespace dpnsound

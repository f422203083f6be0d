#include "dpnsound/constraint.hpp"

#include "dpnsound/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace dpnsound {

std::string_view to_string(Sort sort)
{
    switch (sort) {
    case Sort::Bool:
        return "bool";
    case Sort::Int:
        return "int";
    case Sort::Rat:
        return "rat";
    }
    return "?";
}

std::optional<Sort> parse_sort(std::string_view text)
{
    if (text == "bool" || text == "boolean")
        return Sort::Bool;
    if (text == "int" || text == "integer")
        return Sort::Int;
    if (text == "rat" || text == "real" || text == "rational")
        return Sort::Rat;
    return std::nullopt;
}

std::string display_name(const Var& var)
{
    switch (var.annotation) {
    case Annotation::Plain:
    case Annotation::Read:
        return var.name;
    case Annotation::Written:
        return var.name + "'";
    case Annotation::Placeholder:
        return var.name + "_0";
    }
    return var.name;
}

std::string to_string(const Value& value)
{
    if (const bool* b = std::get_if<bool>(&value))
        return *b ? "true" : "false";
    return to_string(std::get<Rational>(value));
}

Value zero_value(Sort sort)
{
    if (sort == Sort::Bool)
        return false;
    return Rational(0);
}

// ---------------------------------------------------------------------------
// Assignment

void Assignment::set(const Var& var, Value value)
{
    if (var.sort == Sort::Bool) {
        if (!std::holds_alternative<bool>(value))
            throw SortMismatch("numeric value for boolean variable " + display_name(var));
    } else {
        const Rational* r = std::get_if<Rational>(&value);
        if (r == nullptr)
            throw SortMismatch("boolean value for numeric variable " + display_name(var));
        if (var.sort == Sort::Int && !is_integral(*r))
            throw SortMismatch("non-integral value " + to_string(*r) + " for int variable " + display_name(var));
    }
    values_.insert_or_assign(var, std::move(value));
}

const Value& Assignment::at(const Var& var) const
{
    auto it = values_.find(var);
    if (it == values_.end())
        throw UnboundVariable("variable " + display_name(var) + " is not assigned");
    return it->second;
}

const Rational& Assignment::number(const Var& var) const
{
    const Value& v = at(var);
    const Rational* r = std::get_if<Rational>(&v);
    if (r == nullptr)
        throw SortMismatch("variable " + display_name(var) + " holds a boolean");
    return *r;
}

bool Assignment::boolean(const Var& var) const
{
    const Value& v = at(var);
    const bool* b = std::get_if<bool>(&v);
    if (b == nullptr)
        throw SortMismatch("variable " + display_name(var) + " holds a number");
    return *b;
}

// ---------------------------------------------------------------------------
// LinTerm

LinTerm::LinTerm(Rational constant) : constant_(std::move(constant)) {}

LinTerm::LinTerm(const Var& var)
{
    if (!var.numeric())
        throw SortMismatch("boolean variable " + display_name(var) + " used in arithmetic");
    coefficients_.emplace(var, Rational(1));
}

Sort LinTerm::sort() const
{
    for (const auto& [v, k] : coefficients_)
        if (v.sort == Sort::Rat || !is_integral(k))
            return Sort::Rat;
    return is_integral(constant_) ? Sort::Int : Sort::Rat;
}

Rational LinTerm::evaluate(const Assignment& assignment) const
{
    Rational sum = constant_;
    for (const auto& [v, k] : coefficients_)
        sum += k * assignment.number(v);
    return sum;
}

LinTerm& LinTerm::operator+=(const LinTerm& other)
{
    constant_ += other.constant_;
    for (const auto& [v, k] : other.coefficients_) {
        auto [it, inserted] = coefficients_.try_emplace(v, k);
        if (!inserted) {
            it->second += k;
            if (it->second == 0)
                coefficients_.erase(it);
        }
    }
    return *this;
}

LinTerm& LinTerm::operator-=(const LinTerm& other)
{
    return *this += other * Rational(-1);
}

LinTerm& LinTerm::operator*=(const Rational& factor)
{
    if (factor == 0) {
        coefficients_.clear();
        constant_ = 0;
        return *this;
    }
    constant_ *= factor;
    for (auto& [v, k] : coefficients_)
        k *= factor;
    return *this;
}

// ---------------------------------------------------------------------------
// Op

std::string_view symbol(Op op)
{
    switch (op) {
    case Op::Eq:
        return "=";
    case Op::Ne:
        return "!=";
    case Op::Ge:
        return ">=";
    case Op::Gt:
        return ">";
    case Op::Le:
        return "<=";
    case Op::Lt:
        return "<";
    }
    return "?";
}

Op negate(Op op)
{
    switch (op) {
    case Op::Eq:
        return Op::Ne;
    case Op::Ne:
        return Op::Eq;
    case Op::Ge:
        return Op::Lt;
    case Op::Gt:
        return Op::Le;
    case Op::Le:
        return Op::Gt;
    case Op::Lt:
        return Op::Ge;
    }
    return op;
}

Op swapped(Op op)
{
    switch (op) {
    case Op::Ge:
        return Op::Le;
    case Op::Gt:
        return Op::Lt;
    case Op::Le:
        return Op::Ge;
    case Op::Lt:
        return Op::Gt;
    default:
        return op;
    }
}

bool compare(const Rational& lhs, Op op, const Rational& rhs)
{
    switch (op) {
    case Op::Eq:
        return lhs == rhs;
    case Op::Ne:
        return lhs != rhs;
    case Op::Ge:
        return lhs >= rhs;
    case Op::Gt:
        return lhs > rhs;
    case Op::Le:
        return lhs <= rhs;
    case Op::Lt:
        return lhs < rhs;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Constraint construction

namespace {

const std::shared_ptr<const ConstraintNode>& true_node()
{
    static const auto node = std::make_shared<const ConstraintNode>(BoolConstNode{true});
    return node;
}

const std::shared_ptr<const ConstraintNode>& false_node()
{
    static const auto node = std::make_shared<const ConstraintNode>(BoolConstNode{false});
    return node;
}

template <class T>
const T* as(const Constraint& c)
{
    return std::get_if<T>(&c.node().value);
}

} // namespace

Constraint::Constraint() : node_(true_node()) {}

Constraint Constraint::truth() { return Constraint(true_node()); }
Constraint Constraint::falsity() { return Constraint(false_node()); }
Constraint Constraint::constant(bool value) { return value ? truth() : falsity(); }

Constraint Constraint::bool_var(const Var& var)
{
    if (var.sort != Sort::Bool)
        throw SortMismatch("numeric variable " + display_name(var) + " used as a formula");
    return Constraint(std::make_shared<const ConstraintNode>(BoolVarNode{var}));
}

Constraint Constraint::atom(LinTerm lhs, Op op, LinTerm rhs)
{
    LinTerm diff = lhs - rhs;
    if (diff.is_constant())
        return constant(compare(diff.constant(), op, Rational(0)));
    return Constraint(std::make_shared<const ConstraintNode>(AtomNode{std::move(lhs), op, std::move(rhs)}));
}

Constraint Constraint::conj(std::vector<Constraint> children)
{
    std::vector<Constraint> flat;
    for (auto& c : children) {
        if (c.is_true())
            continue;
        if (c.is_false())
            return falsity();
        if (const auto* a = as<AndNode>(c))
            flat.insert(flat.end(), a->children.begin(), a->children.end());
        else
            flat.push_back(std::move(c));
    }
    if (flat.empty())
        return truth();
    if (flat.size() == 1)
        return flat.front();
    return Constraint(std::make_shared<const ConstraintNode>(AndNode{std::move(flat)}));
}

Constraint Constraint::disj(std::vector<Constraint> children)
{
    std::vector<Constraint> flat;
    for (auto& c : children) {
        if (c.is_false())
            continue;
        if (c.is_true())
            return truth();
        if (const auto* o = as<OrNode>(c))
            flat.insert(flat.end(), o->children.begin(), o->children.end());
        else
            flat.push_back(std::move(c));
    }
    if (flat.empty())
        return falsity();
    if (flat.size() == 1)
        return flat.front();
    return Constraint(std::make_shared<const ConstraintNode>(OrNode{std::move(flat)}));
}

Constraint Constraint::negation(const Constraint& c)
{
    return std::visit(
        [&](const auto& n) -> Constraint {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolConstNode>) {
                return constant(!n.value);
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                return atom(n.lhs, dpnsound::negate(n.op), n.rhs);
            } else if constexpr (std::is_same_v<T, AndNode>) {
                std::vector<Constraint> out;
                out.reserve(n.children.size());
                for (const auto& ch : n.children)
                    out.push_back(negation(ch));
                return disj(std::move(out));
            } else if constexpr (std::is_same_v<T, OrNode>) {
                std::vector<Constraint> out;
                out.reserve(n.children.size());
                for (const auto& ch : n.children)
                    out.push_back(negation(ch));
                return conj(std::move(out));
            } else if constexpr (std::is_same_v<T, NotNode>) {
                return n.child;
            } else {
                return Constraint(std::make_shared<const ConstraintNode>(NotNode{c}));
            }
        },
        c.node().value);
}

Constraint Constraint::exists(std::vector<Var> vars, Constraint body)
{
    std::set<Var> free = free_vars(body);
    std::vector<Var> kept;
    for (auto& v : vars)
        if (free.contains(v) && std::find(kept.begin(), kept.end(), v) == kept.end())
            kept.push_back(std::move(v));
    if (kept.empty())
        return body;
    return Constraint(std::make_shared<const ConstraintNode>(ExistsNode{std::move(kept), std::move(body)}));
}

bool Constraint::is_true() const
{
    const auto* b = as<BoolConstNode>(*this);
    return b != nullptr && b->value;
}

bool Constraint::is_false() const
{
    const auto* b = as<BoolConstNode>(*this);
    return b != nullptr && !b->value;
}

bool operator==(const Constraint& a, const Constraint& b)
{
    if (a.node_ == b.node_)
        return true;
    const auto& x = a.node().value;
    const auto& y = b.node().value;
    if (x.index() != y.index())
        return false;
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            const T& m = std::get<T>(y);
            if constexpr (std::is_same_v<T, BoolVarNode>)
                return n.var == m.var && n.var.sort == m.var.sort;
            else if constexpr (std::is_same_v<T, BoolConstNode>)
                return n.value == m.value;
            else if constexpr (std::is_same_v<T, AtomNode>)
                return n.op == m.op && n.lhs == m.lhs && n.rhs == m.rhs;
            else if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>)
                return n.children == m.children;
            else if constexpr (std::is_same_v<T, NotNode>)
                return n.child == m.child;
            else
                return n.vars == m.vars && n.body == m.body;
        },
        x);
}

// ---------------------------------------------------------------------------
// Queries

bool evaluate(const Constraint& c, const Assignment& assignment)
{
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolConstNode>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, BoolVarNode>) {
                return assignment.boolean(n.var);
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                return compare(n.lhs.evaluate(assignment), n.op, n.rhs.evaluate(assignment));
            } else if constexpr (std::is_same_v<T, AndNode>) {
                return std::all_of(n.children.begin(), n.children.end(),
                                   [&](const Constraint& ch) { return evaluate(ch, assignment); });
            } else if constexpr (std::is_same_v<T, OrNode>) {
                return std::any_of(n.children.begin(), n.children.end(),
                                   [&](const Constraint& ch) { return evaluate(ch, assignment); });
            } else if constexpr (std::is_same_v<T, NotNode>) {
                return !evaluate(n.child, assignment);
            } else {
                throw Error("cannot evaluate a quantified formula");
            }
        },
        c.node().value);
}

namespace {

void collect_free(const Constraint& c, std::set<Var>& out)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolVarNode>) {
                out.insert(n.var);
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                for (const auto& [v, k] : n.lhs.coefficients())
                    out.insert(v);
                for (const auto& [v, k] : n.rhs.coefficients())
                    out.insert(v);
            } else if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                for (const auto& ch : n.children)
                    collect_free(ch, out);
            } else if constexpr (std::is_same_v<T, NotNode>) {
                collect_free(n.child, out);
            } else if constexpr (std::is_same_v<T, ExistsNode>) {
                std::set<Var> inner;
                collect_free(n.body, inner);
                for (const auto& v : n.vars)
                    inner.erase(v);
                out.insert(inner.begin(), inner.end());
            }
        },
        c.node().value);
}

LinTerm substitute(const LinTerm& term, const Substitution& sub)
{
    LinTerm out(term.constant());
    for (const auto& [v, k] : term.coefficients()) {
        auto it = sub.find(v);
        if (it == sub.end()) {
            out += LinTerm(v) * k;
            continue;
        }
        if (const Var* w = std::get_if<Var>(&it->second)) {
            if (w->sort != v.sort)
                throw SortMismatch("renaming " + display_name(v) + " to " + display_name(*w) + " changes its sort");
            out += LinTerm(*w) * k;
        } else {
            const LinTerm& t = std::get<LinTerm>(it->second);
            if (v.sort == Sort::Int && t.sort() == Sort::Rat)
                throw SortMismatch("rational term substituted for int variable " + display_name(v));
            out += t * k;
        }
    }
    return out;
}

void replacement_vars(const Replacement& r, std::set<Var>& out)
{
    if (const Var* v = std::get_if<Var>(&r)) {
        out.insert(*v);
        return;
    }
    for (const auto& [v, k] : std::get<LinTerm>(r).coefficients())
        out.insert(v);
}

Constraint rename_impl(const Constraint& c, const Substitution& sub)
{
    if (sub.empty())
        return c;
    return std::visit(
        [&](const auto& n) -> Constraint {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolConstNode>) {
                return c;
            } else if constexpr (std::is_same_v<T, BoolVarNode>) {
                auto it = sub.find(n.var);
                if (it == sub.end())
                    return c;
                const Var* w = std::get_if<Var>(&it->second);
                if (w == nullptr || w->sort != Sort::Bool)
                    throw SortMismatch("boolean variable " + display_name(n.var) + " renamed to a non-boolean");
                return Constraint::bool_var(*w);
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                return Constraint::atom(substitute(n.lhs, sub), n.op, substitute(n.rhs, sub));
            } else if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                std::vector<Constraint> out;
                out.reserve(n.children.size());
                for (const auto& ch : n.children)
                    out.push_back(rename_impl(ch, sub));
                if constexpr (std::is_same_v<T, AndNode>)
                    return Constraint::conj(std::move(out));
                else
                    return Constraint::disj(std::move(out));
            } else if constexpr (std::is_same_v<T, NotNode>) {
                return Constraint::negation(rename_impl(n.child, sub));
            } else {
                Substitution inner = sub;
                for (const auto& v : n.vars)
                    inner.erase(v);
                std::set<Var> body_free = free_vars(n.body);
                std::set<Var> introduced;
                for (const auto& [from, to] : inner)
                    if (body_free.contains(from))
                        replacement_vars(to, introduced);
                for (const auto& v : n.vars)
                    if (introduced.contains(v))
                        throw CaptureError("substitution would capture bound variable " + display_name(v));
                return Constraint::exists(n.vars, rename_impl(n.body, inner));
            }
        },
        c.node().value);
}

} // namespace

std::set<Var> free_vars(const Constraint& c)
{
    std::set<Var> out;
    collect_free(c, out);
    return out;
}

Constraint rename(const Constraint& c, const Substitution& substitution)
{
    return rename_impl(c, substitution);
}

Constraint reannotate(const Constraint& c, Annotation from, Annotation to)
{
    Substitution sub;
    for (const auto& v : free_vars(c))
        if (v.annotation == from)
            sub.emplace(v, v.with(to));
    return rename(c, sub);
}

std::set<Var> read_vars(const Constraint& guard)
{
    std::set<Var> out;
    for (const auto& v : free_vars(guard))
        if (v.annotation == Annotation::Read)
            out.insert(v.plain());
    return out;
}

std::set<Var> write_vars(const Constraint& guard)
{
    std::set<Var> out;
    for (const auto& v : free_vars(guard))
        if (v.annotation == Annotation::Written)
            out.insert(v.plain());
    return out;
}

namespace {

Constraint frame(const Var& v)
{
    Var r = v.read();
    Var w = v.written();
    if (v.sort == Sort::Bool) {
        Constraint br = Constraint::bool_var(r);
        Constraint bw = Constraint::bool_var(w);
        return (bw && br) || (!bw && !br);
    }
    return Constraint::atom(w, Op::Eq, r);
}

} // namespace

Constraint transition_formula(const Constraint& guard, const std::vector<Var>& variables)
{
    std::set<Var> written = write_vars(guard);
    std::vector<Constraint> parts{guard};
    for (const auto& v : variables)
        if (!written.contains(v.plain()))
            parts.push_back(frame(v.plain()));
    return Constraint::conj(std::move(parts));
}

Constraint assignment_formula(const Assignment& assignment)
{
    std::vector<Constraint> parts;
    for (const auto& [v, value] : assignment) {
        if (v.sort == Sort::Bool) {
            Constraint b = Constraint::bool_var(v);
            parts.push_back(std::get<bool>(value) ? b : !b);
        } else {
            parts.push_back(Constraint::atom(v, Op::Eq, std::get<Rational>(value)));
        }
    }
    return Constraint::conj(std::move(parts));
}

Constraint placeholder_formula(const std::vector<Var>& variables)
{
    std::vector<Constraint> parts;
    for (const auto& v : variables) {
        Var p = v.plain();
        Var z = v.placeholder();
        if (v.sort == Sort::Bool) {
            Constraint bp = Constraint::bool_var(p);
            Constraint bz = Constraint::bool_var(z);
            parts.push_back((bp && bz) || (!bp && !bz));
        } else {
            parts.push_back(Constraint::atom(p, Op::Eq, z));
        }
    }
    return Constraint::conj(std::move(parts));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string format_term(const std::vector<std::pair<Var, Rational>>& vars, const Rational& constant)
{
    std::string out;
    for (const auto& [v, k] : vars) {
        Rational mag = k < 0 ? Rational(-k) : k;
        if (out.empty())
            out += k < 0 ? "-" : "";
        else
            out += k < 0 ? " - " : " + ";
        if (mag != 1)
            out += to_string(mag) + "*";
        out += display_name(v);
    }
    if (out.empty())
        return to_string(constant);
    if (constant > 0)
        out += " + " + to_string(constant);
    else if (constant < 0)
        out += " - " + to_string(Rational(-constant));
    return out;
}

// Moves positive-coefficient variables to the left and the rest (plus the constant) to the
// right, so "o' - o > 0" prints as "o' > o".
std::string format_atom(const AtomNode& a)
{
    LinTerm d = a.lhs - a.rhs;
    std::vector<std::pair<Var, Rational>> left;
    std::vector<std::pair<Var, Rational>> right;
    for (const auto& [v, k] : d.coefficients()) {
        if (k > 0)
            left.emplace_back(v, k);
        else
            right.emplace_back(v, Rational(-k));
    }
    Rational rc = -d.constant();
    Op op = a.op;
    if (left.empty()) {
        // all coefficients negative: -x op c  ->  x swapped(op) -c
        std::swap(left, right);
        rc = -rc;
        op = swapped(op);
    }
    std::string lhs = format_term(left, Rational(0));
    std::string rhs;
    if (right.empty())
        rhs = to_string(rc);
    else
        rhs = format_term(right, rc);
    return lhs + " " + std::string(symbol(op)) + " " + rhs;
}

void print(const Constraint& c, std::ostream& os, int parent)
{
    // parent: 0 top, 1 inside And, 2 inside Or/Not
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolConstNode>) {
                os << (n.value ? "true" : "false");
            } else if constexpr (std::is_same_v<T, BoolVarNode>) {
                os << display_name(n.var);
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                os << format_atom(n);
            } else if constexpr (std::is_same_v<T, AndNode>) {
                bool paren = parent == 2;
                if (paren)
                    os << "(";
                for (std::size_t i = 0; i < n.children.size(); ++i) {
                    if (i > 0)
                        os << " && ";
                    print(n.children[i], os, 1);
                }
                if (paren)
                    os << ")";
            } else if constexpr (std::is_same_v<T, OrNode>) {
                bool paren = parent != 0;
                if (paren)
                    os << "(";
                for (std::size_t i = 0; i < n.children.size(); ++i) {
                    if (i > 0)
                        os << " || ";
                    print(n.children[i], os, 1);
                }
                if (paren)
                    os << ")";
            } else if constexpr (std::is_same_v<T, NotNode>) {
                os << "!";
                bool simple = std::holds_alternative<BoolVarNode>(n.child.node().value);
                if (!simple)
                    os << "(";
                print(n.child, os, 0);
                if (!simple)
                    os << ")";
            } else {
                os << "exists ";
                for (std::size_t i = 0; i < n.vars.size(); ++i)
                    os << (i > 0 ? ", " : "") << display_name(n.vars[i]);
                os << ". (";
                print(n.body, os, 0);
                os << ")";
            }
        },
        c.node().value);
}

std::string var_key(const Var& v)
{
    static constexpr const char* tags[] = {"", ".r", ".w", ".0"};
    static constexpr const char* sorts[] = {":B", ":I", ":R"};
    return v.name + tags[static_cast<int>(v.annotation)] + sorts[static_cast<int>(v.sort)];
}

std::string canonical_atom(const AtomNode& a)
{
    LinTerm d = a.lhs - a.rhs;
    Op op = a.op;
    // d op 0 with op in {=, !=, <=, <}
    if (op == Op::Ge || op == Op::Gt) {
        d *= Rational(-1);
        op = swapped(op);
    }
    Integer l = 1;
    for (const auto& [v, k] : d.coefficients())
        l = boost::multiprecision::lcm(l, Integer(boost::multiprecision::denominator(k)));
    l = boost::multiprecision::lcm(l, Integer(boost::multiprecision::denominator(d.constant())));
    d *= Rational(l);
    Integer g = 0;
    for (const auto& [v, k] : d.coefficients())
        g = boost::multiprecision::gcd(g, Integer(boost::multiprecision::abs(boost::multiprecision::numerator(k))));
    g = boost::multiprecision::gcd(g, Integer(boost::multiprecision::abs(boost::multiprecision::numerator(d.constant()))));
    if (g > 1)
        d *= Rational(Integer(1), g);
    if ((op == Op::Eq || op == Op::Ne) && !d.coefficients().empty() && d.coefficients().begin()->second < 0)
        d *= Rational(-1);
    std::string out = "(";
    out += symbol(op);
    for (const auto& [v, k] : d.coefficients())
        out += " " + to_string(k) + "*" + var_key(v);
    out += " " + to_string(d.constant()) + ")";
    return out;
}

std::string canonical_impl(const Constraint& c);

std::string compute_canonical(const Constraint& c)
{
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolConstNode>) {
                return n.value ? "T" : "F";
            } else if constexpr (std::is_same_v<T, BoolVarNode>) {
                return var_key(n.var);
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                return canonical_atom(n);
            } else if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                std::set<std::string> parts;
                for (const auto& ch : n.children)
                    parts.insert(canonical_impl(ch));
                if (parts.size() == 1)
                    return *parts.begin();
                std::string out = std::is_same_v<T, AndNode> ? "(and" : "(or";
                for (const auto& p : parts)
                    out += " " + p;
                return out + ")";
            } else if constexpr (std::is_same_v<T, NotNode>) {
                return "(not " + canonical_impl(n.child) + ")";
            } else {
                std::set<std::string> vars;
                for (const auto& v : n.vars)
                    vars.insert(var_key(v));
                std::string out = "(ex (";
                for (const auto& v : vars)
                    out += " " + v;
                return out + ") " + canonical_impl(n.body) + ")";
            }
        },
        c.node().value);
}

std::string canonical_impl(const Constraint& c)
{
    const ConstraintNode& node = c.node();
    std::call_once(node.canonical_once, [&] { node.canonical_text = compute_canonical(c); });
    return node.canonical_text;
}

} // namespace

std::string to_string(const Constraint& c)
{
    std::ostringstream os;
    print(c, os, 0);
    return os.str();
}

std::string canonical(const Constraint& c)
{
    return canonical_impl(c);
}

} // namespace dpnsound

#pragma once

#include "dpnsound/rational.hpp"

#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dpnsound {

enum class Sort { Bool, Int, Rat };

std::string_view to_string(Sort sort);
std::optional<Sort> parse_sort(std::string_view text);

// PLAIN variables are the process variables V; READ/WRITTEN are the annotated copies v^r, v^w
// used in guards; PLACEHOLDER variables are the fresh copies V_0 that seed CG(b).
enum class Annotation { Plain, Read, Written, Placeholder };

struct Var {
    std::string name;
    Sort sort = Sort::Int;
    Annotation annotation = Annotation::Plain;

    [[nodiscard]] Var with(Annotation a) const { return Var{name, sort, a}; }
    [[nodiscard]] Var plain() const { return with(Annotation::Plain); }
    [[nodiscard]] Var read() const { return with(Annotation::Read); }
    [[nodiscard]] Var written() const { return with(Annotation::Written); }
    [[nodiscard]] Var placeholder() const { return with(Annotation::Placeholder); }

    // Derived plain variable "name@tag".  '@' never occurs in model identifiers, so copies
    // cannot collide with process variables.
    [[nodiscard]] Var copy(std::string_view tag) const
    {
        return Var{name + "@" + std::string(tag), sort, Annotation::Plain};
    }

    [[nodiscard]] bool numeric() const { return sort != Sort::Bool; }

    friend bool operator==(const Var& a, const Var& b) { return a.name == b.name && a.annotation == b.annotation; }
    friend std::strong_ordering operator<=>(const Var& a, const Var& b)
    {
        if (auto c = a.name <=> b.name; c != 0)
            return c;
        return a.annotation <=> b.annotation;
    }
};

// o, o', o_0
std::string display_name(const Var& var);

using Value = std::variant<bool, Rational>;

std::string to_string(const Value& value);
Value zero_value(Sort sort);

class Assignment {
public:
    Assignment() = default;

    // Throws SortMismatch when the value does not inhabit the variable's sort.
    void set(const Var& var, Value value);
    void erase(const Var& var) { values_.erase(var); }

    [[nodiscard]] bool contains(const Var& var) const { return values_.contains(var); }
    // Throws UnboundVariable.
    [[nodiscard]] const Value& at(const Var& var) const;
    [[nodiscard]] const Rational& number(const Var& var) const;
    [[nodiscard]] bool boolean(const Var& var) const;

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] bool empty() const { return values_.empty(); }
    [[nodiscard]] auto begin() const { return values_.begin(); }
    [[nodiscard]] auto end() const { return values_.end(); }

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::map<Var, Value> values_;
};

// constant + sum coefficient * var, over numeric variables only.
class LinTerm {
public:
    LinTerm() = default;
    LinTerm(Rational constant); // NOLINT: implicit on purpose, "x + 1"
    LinTerm(int constant) : LinTerm(Rational(constant)) {} // NOLINT
    LinTerm(const Var& var); // NOLINT: throws SortMismatch for boolean variables

    [[nodiscard]] const Rational& constant() const { return constant_; }
    [[nodiscard]] const std::map<Var, Rational>& coefficients() const { return coefficients_; }
    [[nodiscard]] bool is_constant() const { return coefficients_.empty(); }
    // RAT when any variable is rational or any coefficient is fractional, INT otherwise.
    [[nodiscard]] Sort sort() const;

    [[nodiscard]] Rational evaluate(const Assignment& assignment) const;

    LinTerm& operator+=(const LinTerm& other);
    LinTerm& operator-=(const LinTerm& other);
    LinTerm& operator*=(const Rational& factor);

    friend LinTerm operator+(LinTerm a, const LinTerm& b) { return a += b; }
    friend LinTerm operator-(LinTerm a, const LinTerm& b) { return a -= b; }
    friend LinTerm operator*(LinTerm a, const Rational& k) { return a *= k; }
    friend LinTerm operator*(const Rational& k, LinTerm a) { return a *= k; }
    friend LinTerm operator-(LinTerm a) { return a *= Rational(-1); }
    friend bool operator==(const LinTerm&, const LinTerm&) = default;

private:
    Rational constant_;
    std::map<Var, Rational> coefficients_;
};

enum class Op { Eq, Ne, Ge, Gt, Le, Lt };

std::string_view symbol(Op op);
Op negate(Op op);
// a op b  <=>  b swapped(op) a
Op swapped(Op op);
bool compare(const Rational& lhs, Op op, const Rational& rhs);

struct ConstraintNode;

// Immutable, shareable formula handle.  The smart constructors flatten nested
// conjunctions/disjunctions and fold boolean constants.
class Constraint {
public:
    Constraint(); // true

    static Constraint truth();
    static Constraint falsity();
    static Constraint constant(bool value);
    static Constraint bool_var(const Var& var);
    static Constraint atom(LinTerm lhs, Op op, LinTerm rhs);
    static Constraint conj(std::vector<Constraint> children);
    static Constraint disj(std::vector<Constraint> children);
    // Negation pushed to the atoms; only boolean literals and quantifiers keep an explicit Not.
    static Constraint negation(const Constraint& c);
    static Constraint exists(std::vector<Var> vars, Constraint body);

    [[nodiscard]] const ConstraintNode& node() const { return *node_; }
    [[nodiscard]] bool is_true() const;
    [[nodiscard]] bool is_false() const;

    friend bool operator==(const Constraint& a, const Constraint& b);

private:
    explicit Constraint(std::shared_ptr<const ConstraintNode> node) : node_(std::move(node)) {}

    std::shared_ptr<const ConstraintNode> node_;
};

struct BoolVarNode {
    Var var;
};
struct BoolConstNode {
    bool value;
};
struct AtomNode {
    LinTerm lhs;
    Op op;
    LinTerm rhs;
};
struct AndNode {
    std::vector<Constraint> children;
};
struct OrNode {
    std::vector<Constraint> children;
};
struct NotNode {
    Constraint child;
};
struct ExistsNode {
    std::vector<Var> vars;
    Constraint body;
};

struct ConstraintNode {
    using Value = std::variant<BoolVarNode, BoolConstNode, AtomNode, AndNode, OrNode, NotNode, ExistsNode>;

    explicit ConstraintNode(Value v) : value(std::move(v)) {}

    Value value;

    // canonical() text, computed once per node
    mutable std::once_flag canonical_once;
    mutable std::string canonical_text;
};

inline Constraint operator&&(const Constraint& a, const Constraint& b) { return Constraint::conj({a, b}); }
inline Constraint operator||(const Constraint& a, const Constraint& b) { return Constraint::disj({a, b}); }
inline Constraint operator!(const Constraint& a) { return Constraint::negation(a); }

// Throws UnboundVariable, SortMismatch; quantified formulas are rejected with Error.
bool evaluate(const Constraint& c, const Assignment& assignment);

std::set<Var> free_vars(const Constraint& c);

using Replacement = std::variant<Var, LinTerm>;
using Substitution = std::map<Var, Replacement>;

// Simultaneous substitution.  Throws SortMismatch and CaptureError.
Constraint rename(const Constraint& c, const Substitution& substitution);

// Renames every free variable with the given annotation to the same-named one with another.
Constraint reannotate(const Constraint& c, Annotation from, Annotation to);

// Plain variables whose read (resp. written) copy occurs in the guard.
std::set<Var> read_vars(const Constraint& guard);
std::set<Var> write_vars(const Constraint& guard);

// guard && v^w = v^r for every v in `variables` that the guard does not write.
Constraint transition_formula(const Constraint& guard, const std::vector<Var>& variables);

// C_alpha: conjunction of v = alpha(v) over the assignment's domain.
Constraint assignment_formula(const Assignment& assignment);

// v = v_0 for every variable.
Constraint placeholder_formula(const std::vector<Var>& variables);

std::string to_string(const Constraint& c);

// Order-insensitive serialization used as cache key: conjuncts sorted and deduplicated,
// atoms rewritten to a sum-op-0 form with coprime integer coefficients.
std::string canonical(const Constraint& c);

} // namespace dpnsound

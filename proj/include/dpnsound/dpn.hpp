#pragma once

#include "dpnsound/constraint.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dpnsound {

class SmtGateway;

// Multiset of tokens over place ids.  Places with zero tokens are not stored, so equal
// markings compare equal regardless of how they were built.
class Marking {
public:
    Marking() = default;
    Marking(std::initializer_list<std::pair<const std::string, unsigned>> tokens);

    [[nodiscard]] unsigned operator[](const std::string& place) const;
    void set(const std::string& place, unsigned count);
    void add(const std::string& place, unsigned count) { set(place, (*this)[place] + count); }

    [[nodiscard]] const std::map<std::string, unsigned>& tokens() const { return tokens_; }
    [[nodiscard]] unsigned total() const;
    [[nodiscard]] unsigned max_tokens() const;
    [[nodiscard]] bool empty() const { return tokens_.empty(); }

    // Pointwise >=.
    [[nodiscard]] bool covers(const Marking& other) const;

    friend bool operator==(const Marking&, const Marking&) = default;
    friend auto operator<=>(const Marking&, const Marking&) = default;

private:
    std::map<std::string, unsigned> tokens_;
};

// "{p1, p2}", "{2*p1}", "{}"
std::string to_string(const Marking& m);

struct Place {
    std::string id;
    std::string name;
};

struct Transition {
    std::string id;
    std::string label;
    Constraint guard; // over read/written variables
};

struct Dpn {
    std::string id;
    std::vector<Place> places;
    std::vector<Transition> transitions;
    std::map<std::pair<std::string, std::string>, unsigned> flow; // (source, target) -> weight
    std::vector<Var> variables; // plain
    Marking initial_marking;
    Marking final_marking;
    Assignment initial_assignment;

    [[nodiscard]] const Transition& transition(const std::string& id) const; // throws UnknownReference
    [[nodiscard]] const Transition* find_transition(const std::string& id) const;
    [[nodiscard]] bool has_place(const std::string& id) const;
    [[nodiscard]] std::optional<Var> variable(const std::string& name) const;
    [[nodiscard]] std::map<std::string, Sort> declared() const;

    [[nodiscard]] Marking preset(const Transition& t) const;
    [[nodiscard]] Marking postset(const Transition& t) const;
};

struct DpnState {
    Marking marking;
    Assignment assignment; // over the plain variables

    friend bool operator==(const DpnState&, const DpnState&) = default;
};

// A transition together with beta over V^r and V^w.
struct TransitionFiring {
    std::string transition;
    Assignment beta;
};

bool tokens_suffice(const Dpn& dpn, const Marking& m, const Transition& t);

// Some valid firing of t at s, or nullopt when t is not enabled.  Guards without written
// variables are decided by evaluation; otherwise the solver picks the written values.
// Throws Inconclusive when the solver answers UNKNOWN.
std::optional<TransitionFiring> enabled_firing(const Dpn& dpn, const DpnState& s, const std::string& transition,
                                               SmtGateway& gateway);

// Throws NotEnabled when f is not a valid firing at s.
DpnState fire(const Dpn& dpn, const DpnState& s, const TransitionFiring& f);

// beta for t at s given the written values (missing written values default to the current value).
Assignment make_beta(const Dpn& dpn, const DpnState& s, const Transition& t, const Assignment& written);

struct Diagnostic {
    std::string kind; // IdClash, UnknownReference, UndeclaredVariable, SortMismatch, ...
    std::string element;
    std::string message;
};

std::string to_string(const Diagnostic& d);

std::vector<Diagnostic> validate(const Dpn& dpn);

// Convenience construction for fixtures and tests.  build() validates and throws
// InvalidModel (with all diagnostics), UnknownReference, UndeclaredVariable or GuardParseError.
class DpnBuilder {
public:
    explicit DpnBuilder(std::string id = "net");

    DpnBuilder& place(const std::string& id, unsigned initial = 0, unsigned final = 0);
    DpnBuilder& variable(const std::string& name, Sort sort, std::optional<Value> initial = std::nullopt);
    DpnBuilder& transition(const std::string& id, const std::string& guard = "true", const std::string& label = "");
    DpnBuilder& arc(const std::string& source, const std::string& target, unsigned weight = 1);

    [[nodiscard]] Dpn build() const;

private:
    Dpn dpn_;
    std::vector<std::pair<std::string, std::string>> guards_;
    std::vector<std::tuple<std::string, std::string, unsigned>> arcs_;
};

} // namespace dpnsound

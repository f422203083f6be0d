#pragma once

#include "dpnsound/constraint.hpp"

#include <map>
#include <string>
#include <string_view>

namespace dpnsound {

// Parses guard text.  A bare identifier `x` denotes x^r, `x'` denotes x^w.  Every identifier
// must be declared in `declared` (name -> sort).  See docs/guard-grammar.md.
// Throws GuardParseError (with byte offset) and UndeclaredVariable.
Constraint parse_guard(std::string_view text, const std::map<std::string, Sort>& declared);

// Same grammar, but identifiers denote plain variables and `'` is rejected.  Used for
// formulas over process variables (tests, CLI filters).
Constraint parse_formula(std::string_view text, const std::map<std::string, Sort>& declared);

// Inverse of parse_guard for guards over read/written variables.
std::string to_guard_text(const Constraint& guard);

} // namespace dpnsound

#pragma once

#include "dpnsound/dpn.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dpnsound {

// Reads the PNML dialect described in docs/pnml-dialect.md and validates the net.
// Unrecognized elements are skipped and reported through `warnings`.
// Throws XmlError, UnknownReference, GuardParseError, UndeclaredVariable,
// MissingFinalMarking, InvalidModel.
Dpn parse_pnml(std::string_view xml, std::vector<std::string>* warnings = nullptr);

Dpn load_pnml(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

std::string write_pnml(const Dpn& dpn);

// Same places, transitions (guards up to canonical form), flow, variables and markings.
bool structurally_equal(const Dpn& a, const Dpn& b);

} // namespace dpnsound

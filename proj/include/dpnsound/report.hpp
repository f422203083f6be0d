#pragma once

#include "dpnsound/dpn.hpp"
#include "dpnsound/soundness.hpp"

#include <string>

namespace dpnsound {

struct ReportOptions {
    bool timing = true; // emit the "elapsed" object
    int indent = 2;
};

// JSON document with "schema": 1; see docs/report-schema.md.
std::string export_report(const SoundnessReport& report, const Dpn& dpn, const ReportOptions& options = {});

// Verdict, sizes, solver counts and the witness run, for terminals.
std::string format_report(const SoundnessReport& report, const Dpn& dpn);

} // namespace dpnsound

#include "dpnsound/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace dpnsound {

using nlohmann::ordered_json;

namespace {

ordered_json value_json(const Value& v)
{
    if (const bool* b = std::get_if<bool>(&v))
        return *b;
    const Rational& r = std::get<Rational>(v);
    if (is_integral(r)) {
        const Integer& n = numerator(r);
        if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
            return static_cast<long long>(n);
    }
    return to_string(r);
}

ordered_json assignment_json(const Dpn& dpn, const Assignment& a)
{
    ordered_json out = ordered_json::object();
    for (const auto& v : dpn.variables)
        if (a.contains(v))
            out[v.name] = value_json(a.at(v));
    return out;
}

ordered_json marking_json(const Marking& m)
{
    ordered_json out = ordered_json::object();
    for (const auto& [p, n] : m.tokens())
        out[p] = n;
    return out;
}

ordered_json witness_json(const Dpn& dpn, const Witness& w)
{
    ordered_json steps = ordered_json::array();
    for (const auto& step : w.steps) {
        const Transition& t = dpn.transition(step.firing.transition);
        ordered_json written = ordered_json::object();
        for (const auto& v : write_vars(t.guard))
            written[v.name] = value_json(step.firing.beta.at(v.written()));
        steps.push_back({{"transition", t.id},
                         {"action", t.label},
                         {"written", written},
                         {"marking", marking_json(step.state.marking)},
                         {"values", assignment_json(dpn, step.state.assignment)}});
    }
    return steps;
}

double millis(std::chrono::nanoseconds ns)
{
    return static_cast<double>(ns.count()) / 1e6;
}

} // namespace

std::string export_report(const SoundnessReport& report, const Dpn& dpn, const ReportOptions& options)
{
    ordered_json j;
    j["schema"] = 1;
    j["net"] = report.net;
    j["sound"] = report.sound ? ordered_json(*report.sound) : ordered_json(nullptr);
    j["violated"] = report.violated ? ordered_json(std::string(to_string(*report.violated))) : ordered_json(nullptr);
    j["witness"] = report.witness ? witness_json(dpn, *report.witness) : ordered_json(nullptr);
    j["deadTransitions"] = report.dead_transitions;

    ordered_json violations = ordered_json::array();
    for (const auto& v : report.violations) {
        ordered_json item;
        item["property"] = std::string(to_string(v.property));
        if (v.node && report.cg && report.dds) {
            const CgNode& node = report.cg->nodes[*v.node];
            item["state"] = report.dds->state_name(node.state);
            item["formula"] = to_string(node.formula);
        }
        if (v.blocked_formula)
            item["blocked"] = to_string(*v.blocked_formula);
        if (v.witness)
            item["witness"] = witness_json(dpn, *v.witness);
        if (!v.dead_transitions.empty())
            item["deadTransitions"] = v.dead_transitions;
        violations.push_back(std::move(item));
    }
    j["violations"] = violations;

    j["stats"] = {{"satChecks", report.stats.sat_checks},
                  {"qeCalls", report.stats.qe_calls},
                  {"equivChecks", report.stats.equiv_checks},
                  {"cacheHits", report.stats.cache_hits}};
    j["sizes"] = {{"dds", {report.dds_size.first, report.dds_size.second}},
                  {"cg", {report.cg_size.first, report.cg_size.second}}};
    j["error"] = report.error.empty() ? ordered_json(nullptr) : ordered_json(report.error);
    if (options.timing)
        j["elapsed"] = {{"totalMs", millis(report.elapsed)}, {"solverMs", millis(report.stats.elapsed)}};
    return j.dump(options.indent) + "\n";
}

std::string format_report(const SoundnessReport& report, const Dpn& dpn)
{
    std::ostringstream out;
    out << "net:        " << report.net << "\n";
    out << "verdict:    ";
    if (!report.sound)
        out << "inconclusive (" << report.error << ")\n";
    else if (*report.sound)
        out << "sound\n";
    else
        out << "unsound, violates " << to_string(*report.violated) << "\n";
    out << "|B|:        " << report.dds_size.first << " states, " << report.dds_size.second << " edges\n";
    out << "|CG|:       " << report.cg_size.first << " nodes, " << report.cg_size.second << " edges\n";
    out << "SMT checks: " << report.stats.sat_checks << " sat, " << report.stats.qe_calls << " qe, "
        << report.stats.equiv_checks << " equiv (" << report.stats.cache_hits << " cached)\n";
    char time[64];
    std::snprintf(time, sizeof time, "%.3f s", static_cast<double>(report.elapsed.count()) / 1e9);
    out << "time:       " << time << "\n";

    auto values = [&](const Assignment& a) {
        std::string s;
        for (const auto& v : dpn.variables) {
            if (!s.empty())
                s += ", ";
            s += v.name + "=" + to_string(a.at(v));
        }
        return "[" + s + "]";
    };
    for (const auto& v : report.violations) {
        out << "\n" << to_string(v.property) << ":";
        if (!v.dead_transitions.empty()) {
            out << " dead transitions";
            for (const auto& t : v.dead_transitions)
                out << " " << t;
        }
        out << "\n";
        if (v.node && report.cg && report.dds)
            out << "  at " << report.dds->state_name(report.cg->nodes[*v.node].state) << " | "
                << to_string(report.cg->nodes[*v.node].formula) << "\n";
        if (v.blocked_formula)
            out << "  blocked: " << to_string(*v.blocked_formula) << "\n";
        if (v.witness) {
            out << "  witness:\n";
            out << "    " << to_string(v.witness->initial.marking) << " " << values(v.witness->initial.assignment)
                << "\n";
            for (const auto& step : v.witness->steps)
                out << "    --" << dpn.transition(step.firing.transition).label << "--> "
                    << to_string(step.state.marking) << " " << values(step.state.assignment) << "\n";
        }
    }
    return out.str();
}

} // namespace dpnsound

#include "dpnsound/dot.hpp"

#include <sstream>

namespace dpnsound {

namespace {

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

// record labels treat these as structure
std::string record_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '{' || c == '}' || c == '|' || c == '<' || c == '>' || c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

const char* red = "color=red, fontcolor=red";

} // namespace

std::string dds_to_dot(const Dds& dds, const DotHighlight& highlight)
{
    std::ostringstream out;
    out << "digraph dds {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=ellipse, fontname=\"Helvetica\"];\n";
    out << "  __start [shape=point];\n";
    for (std::size_t s = 0; s < dds.states.size(); ++s) {
        out << "  s" << s << " [label=" << quote(dds.state_name(s));
        if (dds.is_final(s))
            out << ", peripheries=2";
        if (highlight.nodes.contains(s))
            out << ", " << red;
        out << "];\n";
    }
    out << "  __start -> s" << dds.initial << ";\n";
    for (std::size_t e = 0; e < dds.edges.size(); ++e) {
        const DdsEdge& edge = dds.edges[e];
        out << "  s" << edge.source << " -> s" << edge.target << " [label=" << quote(edge.action);
        if (highlight.edges.contains(e))
            out << ", " << red << ", penwidth=2";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string cg_to_dot(const ConstraintGraph& cg, const Dds& dds, const DotHighlight& highlight)
{
    std::ostringstream out;
    out << "digraph cg {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=record, fontname=\"Helvetica\"];\n";
    out << "  __start [shape=point];\n";
    for (std::size_t n = 0; n < cg.nodes.size(); ++n) {
        const CgNode& node = cg.nodes[n];
        std::string label = record_escape(dds.state_name(node.state)) + " | " + record_escape(to_string(node.formula));
        out << "  n" << n << " [label=\"" << label << "\"";
        if (dds.is_final(node.state))
            out << ", peripheries=2";
        if (highlight.nodes.contains(n))
            out << ", " << red;
        out << "];\n";
    }
    if (!cg.nodes.empty())
        out << "  __start -> n" << cg.initial() << ";\n";
    for (std::size_t e = 0; e < cg.edges.size(); ++e) {
        const CgEdge& edge = cg.edges[e];
        out << "  n" << edge.source << " -> n" << edge.target << " [label=" << quote(edge.action);
        if (highlight.edges.contains(e))
            out << ", " << red << ", penwidth=2";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

DotHighlight cg_highlight(const SoundnessReport& report, const Dpn& dpn)
{
    DotHighlight h;
    if (!report.cg || !report.dds)
        return h;
    for (std::size_t n : bad_termination(*report.cg, *report.dds, dpn))
        h.nodes.insert(n);
    for (const auto& v : report.violations)
        if (v.node)
            h.nodes.insert(*v.node);
    if (report.witness)
        for (std::size_t e : report.witness->cg_path)
            h.edges.insert(e);
    return h;
}

DotHighlight dds_highlight(const SoundnessReport& report)
{
    DotHighlight h;
    if (!report.cg || !report.dds || !report.witness)
        return h;
    const auto& cg = *report.cg;
    const auto& dds = *report.dds;
    for (std::size_t e : report.witness->cg_path) {
        const CgEdge& edge = cg.edges[e];
        std::size_t from = cg.nodes[edge.source].state;
        std::size_t to = cg.nodes[edge.target].state;
        for (std::size_t d : dds.outgoing[from])
            if (dds.edges[d].transition == edge.transition && dds.edges[d].target == to)
                h.edges.insert(d);
    }
    for (const auto& v : report.violations)
        if (v.node)
            h.nodes.insert(cg.nodes[*v.node].state);
    return h;
}

} // namespace dpnsound

#include "dpnsound/pnml.hpp"

#include "dpnsound/errors.hpp"
#include "dpnsound/guard_parser.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace dpnsound {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::optional<std::string> attr(const pt::ptree& node, const std::string& name)
{
    if (auto v = node.get_optional<std::string>("<xmlattr>." + name))
        return trim(*v);
    return std::nullopt;
}

// <x><text>..</text></x> or <x>..</x>
std::optional<std::string> text_of(const pt::ptree& node, const std::string& child)
{
    auto c = node.get_child_optional(child);
    if (!c)
        return std::nullopt;
    if (auto t = c->get_optional<std::string>("text"))
        return trim(*t);
    return trim(c->data());
}

unsigned parse_count(const std::string& text, const std::string& where)
{
    try {
        std::size_t used = 0;
        long long v = std::stoll(text, &used);
        if (used != text.size() || v < 0)
            throw std::invalid_argument(text);
        return static_cast<unsigned>(v);
    } catch (const std::exception&) {
        throw XmlError("invalid token count '" + text + "' in " + where);
    }
}

struct Raw {
    std::vector<std::pair<std::string, const pt::ptree*>> places;
    std::vector<std::pair<std::string, const pt::ptree*>> transitions;
    std::vector<const pt::ptree*> arcs;
    std::vector<const pt::ptree*> variables;
    std::vector<const pt::ptree*> final_markings;
};

void collect(const pt::ptree& container, Raw& raw, std::vector<std::string>* warnings, const std::string& where)
{
    for (const auto& [tag, child] : container) {
        if (tag == "<xmlattr>" || tag == "<xmlcomment>" || tag == "name")
            continue;
        if (tag == "place") {
            raw.places.emplace_back(attr(child, "id").value_or(""), &child);
        } else if (tag == "transition") {
            raw.transitions.emplace_back(attr(child, "id").value_or(""), &child);
        } else if (tag == "arc") {
            raw.arcs.push_back(&child);
        } else if (tag == "variable") {
            raw.variables.push_back(&child);
        } else if (tag == "variables") {
            for (const auto& [vt, v] : child) {
                if (vt == "variable")
                    raw.variables.push_back(&v);
                else if (vt != "<xmlattr>" && vt != "<xmlcomment>" && warnings)
                    warnings->push_back("ignored element <" + vt + "> in <variables>");
            }
        } else if (tag == "finalmarkings") {
            for (const auto& [mt, m] : child) {
                if (mt == "marking")
                    raw.final_markings.push_back(&m);
                else if (mt != "<xmlattr>" && mt != "<xmlcomment>" && warnings)
                    warnings->push_back("ignored element <" + mt + "> in <finalmarkings>");
            }
        } else if (tag == "page") {
            collect(child, raw, warnings, "page");
        } else if (warnings) {
            warnings->push_back("ignored element <" + tag + "> in <" + where + ">");
        }
    }
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

} // namespace

Dpn parse_pnml(std::string_view xml, std::vector<std::string>* warnings)
{
    pt::ptree doc;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw XmlError(std::string("malformed XML: ") + e.what());
    }
    auto root = doc.get_child_optional("pnml");
    if (!root)
        throw XmlError("missing <pnml> root element");
    auto net = root->get_child_optional("net");
    if (!net)
        throw XmlError("missing <net> element");

    Dpn dpn;
    dpn.id = attr(*net, "id").value_or("net");

    Raw raw;
    collect(*net, raw, warnings, "net");

    // variables first: guards need their sorts
    for (const auto* v : raw.variables) {
        auto name = attr(*v, "name");
        if (!name || name->empty())
            throw XmlError("<variable> without a name");
        auto sort_text = attr(*v, "sort").value_or("int");
        auto sort = parse_sort(sort_text);
        if (!sort)
            throw InvalidModel("variable '" + *name + "' has unknown sort '" + sort_text + "'");
        Var var{*name, *sort, Annotation::Plain};
        if (dpn.variable(*name))
            throw InvalidModel("variable '" + *name + "' declared twice");
        Value initial = zero_value(*sort);
        if (auto init = attr(*v, "initial")) {
            if (*sort == Sort::Bool) {
                if (*init != "true" && *init != "false")
                    throw InvalidModel("boolean variable '" + *name + "' has initial value '" + *init + "'");
                initial = *init == "true";
            } else {
                try {
                    initial = parse_rational(*init);
                } catch (const std::invalid_argument&) {
                    throw InvalidModel("variable '" + *name + "' has unreadable initial value '" + *init + "'");
                }
            }
        }
        dpn.variables.push_back(var);
        try {
            dpn.initial_assignment.set(var, initial);
        } catch (const SortMismatch& e) {
            throw InvalidModel(e.what());
        }
    }
    auto declared = dpn.declared();

    for (const auto& [id, node] : raw.places) {
        if (id.empty())
            throw XmlError("<place> without an id");
        dpn.places.push_back({id, text_of(*node, "name").value_or(id)});
        if (auto m = text_of(*node, "initialMarking"))
            dpn.initial_marking.add(id, parse_count(*m, "place '" + id + "'"));
    }

    for (const auto& [id, node] : raw.transitions) {
        if (id.empty())
            throw XmlError("<transition> without an id");
        Transition t{id, text_of(*node, "name").value_or(id), Constraint::truth()};
        if (auto g = text_of(*node, "guard"))
            t.guard = parse_guard(*g, declared);
        dpn.transitions.push_back(std::move(t));
    }

    for (const auto* a : raw.arcs) {
        auto src = attr(*a, "source");
        auto dst = attr(*a, "target");
        if (!src || !dst)
            throw XmlError("<arc> without source or target");
        for (const auto& end : {*src, *dst})
            if (!dpn.has_place(end) && dpn.find_transition(end) == nullptr)
                throw UnknownReference("arc refers to undeclared node '" + end + "'");
        unsigned w = 1;
        if (auto ins = text_of(*a, "inscription"))
            w = parse_count(*ins, "arc " + *src + "->" + *dst);
        dpn.flow[{*src, *dst}] += w;
    }

    if (raw.final_markings.empty())
        throw MissingFinalMarking("net '" + dpn.id + "' declares no final marking");
    if (raw.final_markings.size() > 1)
        throw InvalidModel("net '" + dpn.id + "' declares " + std::to_string(raw.final_markings.size())
                           + " final markings; exactly one is supported");
    for (const auto& [tag, p] : *raw.final_markings.front()) {
        if (tag != "place") {
            if (tag != "<xmlattr>" && tag != "<xmlcomment>" && warnings)
                warnings->push_back("ignored element <" + tag + "> in <marking>");
            continue;
        }
        auto ref = attr(p, "idref");
        if (!ref)
            throw XmlError("final marking <place> without idref");
        if (!dpn.has_place(*ref))
            throw UnknownReference("final marking refers to undeclared place '" + *ref + "'");
        std::string count = p.get_optional<std::string>("text").map(trim).value_or(trim(p.data()));
        dpn.final_marking.add(*ref, count.empty() ? 1 : parse_count(count, "final marking"));
    }

    auto diags = validate(dpn);
    if (!diags.empty()) {
        std::string msg = "invalid net '" + dpn.id + "':";
        for (const auto& d : diags)
            msg += "\n  " + to_string(d);
        throw InvalidModel(msg);
    }
    return dpn;
}

Dpn load_pnml(const std::filesystem::path& path, std::vector<std::string>* warnings)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw XmlError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_pnml(buf.str(), warnings);
}

std::string write_pnml(const Dpn& dpn)
{
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<pnml>\n";
    out << "  <net id=\"" << escape(dpn.id) << "\">\n";
    for (const auto& v : dpn.variables)
        out << "    <variable name=\"" << escape(v.name) << "\" sort=\"" << to_string(v.sort) << "\" initial=\""
            << escape(to_string(dpn.initial_assignment.at(v))) << "\"/>\n";
    for (const auto& p : dpn.places) {
        out << "    <place id=\"" << escape(p.id) << "\">";
        if (p.name != p.id)
            out << "<name><text>" << escape(p.name) << "</text></name>";
        if (unsigned n = dpn.initial_marking[p.id])
            out << "<initialMarking><text>" << n << "</text></initialMarking>";
        out << "</place>\n";
    }
    for (const auto& t : dpn.transitions) {
        out << "    <transition id=\"" << escape(t.id) << "\">";
        if (t.label != t.id)
            out << "<name><text>" << escape(t.label) << "</text></name>";
        if (!t.guard.is_true())
            out << "<guard>" << escape(to_guard_text(t.guard)) << "</guard>";
        out << "</transition>\n";
    }
    for (const auto& [edge, w] : dpn.flow) {
        out << "    <arc source=\"" << escape(edge.first) << "\" target=\"" << escape(edge.second) << "\"";
        if (w != 1)
            out << "><inscription><text>" << w << "</text></inscription></arc>\n";
        else
            out << "/>\n";
    }
    out << "    <finalmarkings>\n      <marking>\n";
    for (const auto& [p, n] : dpn.final_marking.tokens())
        out << "        <place idref=\"" << escape(p) << "\"><text>" << n << "</text></place>\n";
    out << "      </marking>\n    </finalmarkings>\n";
    out << "  </net>\n</pnml>\n";
    return out.str();
}

bool structurally_equal(const Dpn& a, const Dpn& b)
{
    auto places = [](const Dpn& d) {
        std::map<std::string, std::string> m;
        for (const auto& p : d.places)
            m.emplace(p.id, p.name);
        return m;
    };
    auto transitions = [](const Dpn& d) {
        std::map<std::string, std::pair<std::string, std::string>> m;
        for (const auto& t : d.transitions)
            m.emplace(t.id, std::make_pair(t.label, canonical(t.guard)));
        return m;
    };
    auto variables = [](const Dpn& d) {
        std::map<std::string, Sort> m;
        for (const auto& v : d.variables)
            m.emplace(v.name, v.sort);
        return m;
    };
    return a.id == b.id && places(a) == places(b) && transitions(a) == transitions(b) && a.flow == b.flow
           && variables(a) == variables(b) && a.initial_marking == b.initial_marking
           && a.final_marking == b.final_marking && a.initial_assignment == b.initial_assignment;
}

} // namespace dpnsound

#pragma once

#include "dpnsound/guard_parser.hpp"
#include "dpnsound/pnml.hpp"
#include "dpnsound/smt.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>

namespace testing {

inline std::filesystem::path model_path(const std::string& name)
{
    return std::filesystem::path(DPNSOUND_SOURCE_DIR) / "models" / (name + ".pnml");
}

inline std::filesystem::path fixture_path(const std::string& name)
{
    return std::filesystem::path(DPNSOUND_SOURCE_DIR) / "tests" / "fixtures" / name;
}

inline dpnsound::Dpn model(const std::string& name)
{
    return dpnsound::load_pnml(model_path(name));
}

// One solver session per test binary keeps the suites fast.
inline dpnsound::SmtGateway& gateway()
{
    static dpnsound::SmtGateway gw(dpnsound::SolverConfig::from_environment());
    return gw;
}

// Formula over o, t (rat) and the placeholders o0, t0, written o_0, t_0 in output.
inline dpnsound::Constraint auction_formula(const std::string& text)
{
    using namespace dpnsound;
    std::map<std::string, Sort> declared{{"o", Sort::Rat}, {"t", Sort::Rat}, {"o0", Sort::Rat}, {"t0", Sort::Rat}};
    Constraint c = parse_formula(text, declared);
    Substitution sub;
    sub.emplace(Var{"o0", Sort::Rat}, Var{"o", Sort::Rat, Annotation::Placeholder});
    sub.emplace(Var{"t0", Sort::Rat}, Var{"t", Sort::Rat, Annotation::Placeholder});
    return rename(c, sub);
}

} // namespace testing

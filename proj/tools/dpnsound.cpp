#include "dpnsound/bench.hpp"
#include "dpnsound/dot.hpp"
#include "dpnsound/errors.hpp"
#include "dpnsound/oracle.hpp"
#include "dpnsound/pnml.hpp"
#include "dpnsound/report.hpp"
#include "dpnsound/soundness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace dpnsound;

constexpr int exit_sound = 0;
constexpr int exit_error = 1;
constexpr int exit_unsound = 2;

void write_output(const std::string& path, const std::string& text)
{
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << text;
}

Dpn load(const std::string& path)
{
    std::vector<std::string> warnings;
    Dpn dpn = load_pnml(path, &warnings);
    for (const auto& w : warnings)
        std::cerr << path << ": warning: " << w << "\n";
    return dpn;
}

struct CheckArgs {
    std::string file;
    unsigned bound = 1;
    std::string solver;
    std::string solver_args;
    std::size_t budget = 10000;
    double timeout = 0;
    std::string json;
    std::string dot_dds;
    std::string dot_cg;
    unsigned jobs = 1;
    bool all = false;
    std::string order = "bfs";
};

int run_check(const CheckArgs& args)
{
    Dpn dpn = load(args.file);
    SolverConfig solver = SolverConfig::from_environment();
    if (!args.solver.empty())
        solver.executable = args.solver;
    if (!args.solver_args.empty()) {
        solver.args.clear();
        std::istringstream in(args.solver_args);
        for (std::string a; in >> a;)
            solver.args.push_back(a);
    }
    if (args.timeout > 0)
        solver.timeout = std::chrono::milliseconds(static_cast<long long>(args.timeout * 1000));
    SmtGateway gateway(solver);

    CheckConfig config;
    config.bound = args.bound;
    config.budget = args.budget;
    config.jobs = std::max(1u, args.jobs);
    config.short_circuit = !args.all;
    config.order = args.order == "dfs" ? ExplorationOrder::Dfs : ExplorationOrder::Bfs;

    SoundnessReport report = check_sound(dpn, config, gateway);

    if (args.json != "-")
        std::cout << format_report(report, dpn);
    if (!args.json.empty())
        write_output(args.json, export_report(report, dpn));
    if (!args.dot_dds.empty() && report.dds)
        write_output(args.dot_dds, dds_to_dot(*report.dds, dds_highlight(report)));
    if (!args.dot_cg.empty() && report.cg && report.dds)
        write_output(args.dot_cg, cg_to_dot(*report.cg, *report.dds, cg_highlight(report, dpn)));

    if (!report.sound)
        return exit_error;
    return *report.sound ? exit_sound : exit_unsound;
}

struct OracleArgs {
    std::string file;
    std::string box;
    unsigned bound = 1;
    std::size_t cap = 1000000;
};

int run_oracle(const OracleArgs& args)
{
    Dpn dpn = load(args.file);
    DomainBox box = args.box.empty() ? DomainBox::defaults(dpn) : DomainBox::parse(args.box, dpn);
    OracleVerdict v = oracle_soundness(dpn, box, args.bound, args.cap);
    std::cout << "net:        " << dpn.id << "\n";
    std::cout << "verdict:    " << (v.sound ? "sound" : "unsound, violates " + std::string(to_string(*v.violated)))
              << " (within the box)\n";
    std::cout << "states:     " << v.graph.states.size() << "\n";
    std::cout << "edges:      " << v.graph.edges.size() << "\n";
    if (!v.dead_transitions.empty()) {
        std::cout << "dead:      ";
        for (const auto& t : v.dead_transitions)
            std::cout << " " << t;
        std::cout << "\n";
    }
    std::cout << "bad:        " << v.bad_states.size() << " states\n";
    std::cout << "blocked:    " << v.blocked_states.size() << " states\n";
    return v.sound ? exit_sound : exit_unsound;
}

struct MutateArgs {
    std::string kind;
    std::string file;
    std::size_t n = 1;
    std::string output = "-";
    std::string op = "=";
};

int run_mutate(const MutateArgs& args)
{
    static const std::map<std::string, Op> ops{{"=", Op::Eq}, {"==", Op::Eq}, {"!=", Op::Ne}, {">=", Op::Ge},
                                               {">", Op::Gt},  {"<=", Op::Le},  {"<", Op::Lt}};
    Dpn dpn = load(args.file);
    Dpn mutant = args.kind == "states" ? add_sequential_states(dpn, args.n)
                                       : add_chained_vars(dpn, args.n, ops.at(args.op));
    write_output(args.output, write_pnml(mutant));
    return exit_sound;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Data-aware soundness checker for bounded data Petri nets"};
    app.require_subcommand(1);

    CheckArgs check;
    auto* check_cmd = app.add_subcommand("check", "Decide soundness of a net");
    check_cmd->add_option("file", check.file, "PNML model")->required()->check(CLI::ExistingFile);
    check_cmd->add_option("--bound,-k", check.bound, "Token bound per place")->capture_default_str();
    check_cmd->add_option("--solver", check.solver, "SMT solver executable (default $DPNSOUND_SOLVER or z3)");
    check_cmd->add_option("--solver-args", check.solver_args, "Solver arguments, whitespace separated");
    check_cmd->add_option("--budget", check.budget, "Constraint-graph node budget")->capture_default_str();
    check_cmd->add_option("--timeout", check.timeout, "Per-query solver timeout in seconds");
    check_cmd->add_option("--json", check.json, "Write the JSON report to a file ('-' for stdout)");
    check_cmd->add_option("--dot-dds", check.dot_dds, "Write the DDS as DOT");
    check_cmd->add_option("--dot-cg", check.dot_cg, "Write the constraint graph as DOT");
    check_cmd->add_option("--jobs,-j", check.jobs, "Worker solver sessions")->capture_default_str();
    check_cmd->add_flag("--all", check.all, "Report every violation instead of stopping at the first");
    check_cmd->add_option("--order", check.order, "Exploration order")
        ->check(CLI::IsMember({"bfs", "dfs"}))
        ->capture_default_str();

    OracleArgs oracle;
    auto* oracle_cmd = app.add_subcommand("oracle", "Explicit-state soundness over a finite value box");
    oracle_cmd->add_option("file", oracle.file, "PNML model")->required()->check(CLI::ExistingFile);
    oracle_cmd->add_option("--box", oracle.box, "Domains, e.g. 'int=-3..3;rat=-1,0,1/2;x=0..5'");
    oracle_cmd->add_option("--bound,-k", oracle.bound, "Token bound per place")->capture_default_str();
    oracle_cmd->add_option("--cap", oracle.cap, "Abort past this many states")->capture_default_str();

    MutateArgs mutate;
    auto* mutate_cmd = app.add_subcommand("mutate", "Write a scaled benchmark variant of a net");
    mutate_cmd->add_option("kind", mutate.kind, "states or vars")
        ->required()
        ->check(CLI::IsMember({"states", "vars"}));
    mutate_cmd->add_option("file", mutate.file, "PNML model")->required()->check(CLI::ExistingFile);
    mutate_cmd->add_option("-n", mutate.n, "Number of added places or chained variables")->required();
    mutate_cmd->add_option("--output,-o", mutate.output, "Output file ('-' for stdout)")->capture_default_str();
    mutate_cmd->add_option("--op", mutate.op, "Chain operator for vars")
        ->check(CLI::IsMember({"=", "==", "!=", ">=", ">", "<=", "<"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_error;
    }

    try {
        if (*check_cmd)
            return run_check(check);
        if (*oracle_cmd)
            return run_oracle(oracle);
        if (*mutate_cmd)
            return run_mutate(mutate);
    } catch (const dpnsound::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}

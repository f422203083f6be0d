#pragma once

#include "dpnsound/constraint.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dpnsound {

// Minimal s-expression tree for reading solver output.  Quoted symbols |..| are stored
// without the bars.
struct SExpr {
    bool is_atom = true;
    std::string atom;
    std::vector<SExpr> list;

    [[nodiscard]] bool is(std::string_view symbol) const { return is_atom && atom == symbol; }
    [[nodiscard]] std::string_view head() const
    {
        return (!is_atom && !list.empty() && list.front().is_atom) ? std::string_view(list.front().atom) : "";
    }
    [[nodiscard]] std::string str() const;
};

// Parses every top-level expression in `text`.  Throws SolverFailure on malformed input.
std::vector<SExpr> parse_sexprs(std::string_view text);

struct SolverConfig {
    std::string executable = "z3";
    std::vector<std::string> args; // empty: "-in"
    std::chrono::milliseconds timeout{10000};
    bool cache = true;
    // Re-check every simplify() result with equivalent(); throws SolverFailure on mismatch.
    bool verify_simplify = false;

    // DPNSOUND_SOLVER (path), DPNSOUND_SOLVER_ARGS (whitespace separated), DPNSOUND_TIMEOUT_MS.
    static SolverConfig from_environment();
};

// A persistent interactive solver process speaking SMT-LIB2 on stdin/stdout.
class SolverProcess {
public:
    SolverProcess(std::string executable, std::vector<std::string> args, std::vector<std::string> prelude);
    ~SolverProcess();
    SolverProcess(const SolverProcess&) = delete;
    SolverProcess& operator=(const SolverProcess&) = delete;

    // Sends `commands` and returns everything the solver printed in response.  Returns
    // nullopt when no answer arrives within `timeout`; the process is then restarted.
    // Throws SolverUnavailable when the executable cannot be started, SolverFailure when
    // it dies.
    std::optional<std::string> exchange(const std::string& commands, std::chrono::milliseconds timeout);

    void restart();

private:
    void start();
    void stop();

    std::string executable_;
    std::vector<std::string> args_;
    std::vector<std::string> prelude_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string pending_;
};

struct SatResult {
    enum class Status { Sat, Unsat, Unknown };

    Status status = Status::Unknown;
    Assignment model; // SAT only: every free variable of the query
    std::string reason; // UNKNOWN only

    [[nodiscard]] bool sat() const { return status == Status::Sat; }
    [[nodiscard]] bool unsat() const { return status == Status::Unsat; }
    [[nodiscard]] bool unknown() const { return status == Status::Unknown; }
};

struct SolverStats {
    std::uint64_t sat_checks = 0;
    std::uint64_t qe_calls = 0;
    std::uint64_t equiv_checks = 0;
    std::uint64_t cache_hits = 0;
    std::chrono::nanoseconds elapsed{0};

    SolverStats& operator+=(const SolverStats& other);
};

// Answers keyed by canonical(constraint).  Shared between per-worker gateways.
class QueryCache {
public:
    std::optional<SatResult> find_sat(const std::string& key);
    void store_sat(const std::string& key, const SatResult& result);
    std::optional<Constraint> find_qe(const std::string& key);
    void store_qe(const std::string& key, const Constraint& result);
    std::optional<bool> find_equiv(const std::string& key);
    void store_equiv(const std::string& key, bool result);

private:
    std::mutex mutex_;
    std::unordered_map<std::string, SatResult> sat_;
    std::unordered_map<std::string, Constraint> qe_;
    std::unordered_map<std::string, bool> equiv_;
};

// Satisfiability, quantifier elimination and equivalence, delegated to one solver session.
// Not thread-safe; use one gateway per thread (they may share a QueryCache).
class SmtGateway {
public:
    explicit SmtGateway(SolverConfig config = SolverConfig::from_environment(),
                        std::shared_ptr<QueryCache> cache = nullptr);

    // UNKNOWN on timeout.  Throws SolverUnavailable, SolverFailure.
    SatResult is_sat(const Constraint& c);

    // Quantifier-free equivalent of exists vars. c.  Throws QENotSupported when the solver
    // leaves quantifiers or non-linear residue, Inconclusive on timeout.
    Constraint qe(const std::vector<Var>& vars, const Constraint& c);

    // Throws Inconclusive when the solver answers UNKNOWN.
    bool equivalent(const Constraint& a, const Constraint& b);

    // Local syntactic clean-up: constant folding, deduplication, bound merging.
    Constraint simplify(const Constraint& c);

    [[nodiscard]] const SolverStats& stats() const { return stats_; }
    [[nodiscard]] const SolverConfig& config() const { return config_; }
    [[nodiscard]] const std::shared_ptr<QueryCache>& cache() const { return cache_; }

private:
    std::string run(const std::string& commands, bool& timed_out);

    SolverConfig config_;
    std::shared_ptr<QueryCache> cache_;
    std::unique_ptr<SolverProcess> process_;
    SolverStats stats_;
};

// SMT-LIB2 rendering used by the gateway, exposed for tests.
std::string smt_symbol(const Var& var);
std::string smt_sort(Sort sort);
std::string to_smtlib(const Constraint& c);

// Reads a solver formula back.  `symbols` maps SMT symbol names (without bars) to variables.
// Throws QENotSupported for quantifiers, ite over terms, mod/div; SolverFailure otherwise.
Constraint from_smtlib(const SExpr& e, const std::map<std::string, Var>& symbols);

} // namespace dpnsound

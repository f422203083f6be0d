#pragma once

#include "dpnsound/dds.hpp"
#include "dpnsound/smt.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dpnsound {

enum class CgMode { Main, Placeholder };
enum class ExplorationOrder { Bfs, Dfs };

struct CgNode {
    std::size_t state;
    Constraint formula;
    std::optional<std::size_t> parent_edge; // edge that created the node
    std::size_t depth = 0;
};

struct CgEdge {
    std::size_t source;
    std::string transition;
    std::string action;
    std::size_t target;
};

struct ConstraintGraph {
    CgMode mode = CgMode::Main;
    std::size_t start_state = 0;
    std::vector<CgNode> nodes; // node 0 is the initial node
    std::vector<CgEdge> edges;

    [[nodiscard]] std::size_t initial() const { return 0; }
    // Node ids ordered by (depth, id): shallowest first.
    [[nodiscard]] std::vector<std::size_t> by_depth() const;
};

// Edge indices from the initial node to `node` along recorded parent edges.
std::vector<std::size_t> path_to_node(const ConstraintGraph& cg, std::size_t node);

struct CgOptions {
    std::size_t budget = 10000;
    ExplorationOrder order = ExplorationOrder::Bfs;
};

// final(b) and the eliminated continuation formula per DDS state, shared between engines
// working on the same DDS from different threads.
class FinalMemo {
public:
    std::optional<std::vector<Constraint>> find_final(std::size_t state);
    void store_final(std::size_t state, std::vector<Constraint> formulas);
    std::optional<Constraint> find_continuable(std::size_t state);
    void store_continuable(std::size_t state, Constraint formula);

private:
    std::mutex mutex_;
    std::map<std::size_t, std::vector<Constraint>> final_;
    std::map<std::size_t, Constraint> continuable_;
};

class SymbolicEngine {
public:
    SymbolicEngine(const Dds& dds, SmtGateway& gateway, CgOptions options = {},
                   std::shared_ptr<FinalMemo> memo = nullptr);

    // Quantifier-free equivalent of exists U. phi[U/V] && Delta_t[U/V^r, V/V^w].
    Constraint update(const Constraint& phi, const std::string& transition);

    // Throws BudgetExceeded when the graph outgrows options.budget nodes.
    ConstraintGraph build(std::size_t start, CgMode mode);

    // Formulas of the final-state nodes of the placeholder graph started at `state`.
    const std::vector<Constraint>& final_formulas(std::size_t state);

    // qe(V, or final(state)): over the placeholder variables only.
    Constraint continuable(std::size_t state);

    // phi[V_0/V] && !continuable(state).
    Constraint blocked(std::size_t state, const Constraint& phi);

    [[nodiscard]] const Dds& dds() const { return dds_; }
    [[nodiscard]] SmtGateway& gateway() { return gateway_; }
    [[nodiscard]] const std::shared_ptr<FinalMemo>& memo() const { return memo_; }

private:
    const Dds& dds_;
    SmtGateway& gateway_;
    CgOptions options_;
    std::shared_ptr<FinalMemo> memo_;
    std::map<std::size_t, std::vector<Constraint>> local_final_;
};

} // namespace dpnsound

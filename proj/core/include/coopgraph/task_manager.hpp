#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coopgraph/actions.hpp"
#include "coopgraph/hierarchy.hpp"
#include "coopgraph/world.hpp"

namespace coop {

class NoGrounding : public ModelError {
public:
    using ModelError::ModelError;
};
class NotGrounded : public ModelError {
public:
    using ModelError::ModelError;
};

/// One row of the Action-State table: a feasible hyper-arc with its ordered
/// action list, or a feasible node with its process list.
struct TableRow {
    std::string graph;  // instance id
    std::string item;   // node or hyper-arc id
    bool is_arc = false;
    double cost = 0;
    std::vector<std::string> steps;  // action names (arc) or process names (node)
    std::vector<bool> done;
    bool grounded = false;
    Substitution grounding;
    std::vector<std::vector<std::string>> assignees;  // per step, set when grounded

    std::optional<std::size_t> first_undone() const;
};

/// Mirrors the current suggestion set exactly, one row per suggestion.
/// Rows are ordered by (cost, item id, graph id).
class ActionStateTable {
public:
    ActionStateTable() = default;
    /// Throws UnknownAction when an arc row names an action absent from the
    /// library.
    static ActionStateTable build(const std::vector<HierSuggestion>& suggestions,
                                  const HierGraph& model, const ActionLibrary& lib);

    const std::vector<TableRow>& rows() const { return rows_; }
    std::vector<TableRow>& rows() { return rows_; }
    bool empty() const { return rows_.empty(); }

    /// Minimum-cost row, ties broken lexicographically by row id; absent when
    /// the table is empty.
    std::optional<std::size_t> select_optimal() const;
    std::optional<std::size_t> find(const std::string& graph, const std::string& item) const;

private:
    std::vector<TableRow> rows_;
};

/// One leaf of the decision tree: a full grounding of the row's variables
/// plus one agent assignment per action, scored by J(b) = eps(b) / sum(t_i).
struct DecisionBranch {
    Substitution grounding;
    std::vector<std::vector<std::string>> assignees;  // per action
    std::vector<SimulationOutcome> outcomes;          // filled by evaluation
    double total_seconds = 0;
    double utility = 0;
};

/// Enumerates groundings x agent assignments for an arc row. Object
/// variables are grounded against the world in first-occurrence order with
/// candidates in lexicographic order; identical `any` agent sets within the
/// row share one choice, enumerated after the object variables in
/// declaration order. `pinned` bindings (e.g. from a recognised human
/// action) restrict their variables to the given constants.
/// Throws NoGrounding when some variable has no candidate.
std::vector<DecisionBranch> generate_decision_tree(const TableRow& row, const ActionLibrary& lib,
                                                   const WorldState& world,
                                                   const AgentRoster& roster,
                                                   const Substitution& pinned = {});

/// Simulates every branch breadth-first on a snapshot of the world. The
/// first failed or timed-out action zeroes the branch utility; otherwise
/// J(b) is the inverse of the summed execution times.
void evaluate_decision_tree(std::vector<DecisionBranch>& branches, const TableRow& row,
                            const ActionLibrary& lib, const WorldState& world,
                            const AgentRoster& roster);

struct OptimalStateUpdate {
    bool grounded = false;           // false: every branch failed, row is infeasible
    std::size_t branch_index = 0;    // argmax of J, first on ties
};

/// Binds the argmax branch to the row, or reports the row infeasible when
/// all utilities are zero so selection can retry.
OptimalStateUpdate update_optimal_state(TableRow& row,
                                        const std::vector<DecisionBranch>& branches);

struct NextAction {
    std::size_t step = 0;
    std::string action;
    std::vector<std::string> agents;
};

/// First undone action of a grounded row; absent when all are done.
/// Throws NotGrounded for an ungrounded arc row.
std::optional<NextAction> find_next_action(const TableRow& row);

/// Grounded view of one row action, ready for simulation or effect
/// application.
GroundedAction ground_row_action(const TableRow& row, std::size_t step,
                                 const ActionLibrary& lib);

struct Event {
    enum class Kind { RobotAck, HumanAction, ProcessDeactivated };
    Kind kind = Kind::RobotAck;
    double time = 0;
    bool ok = true;             // RobotAck
    std::string action;         // HumanAction
    Substitution grounding;     // HumanAction
    std::string process;        // ProcessDeactivated
};

struct Directive {
    enum class Kind {
        ActionDone,        // a step of the active row completed
        RowCompleted,      // active row fully executed, reported to the graph
        TerminateRobot,    // human took over: stop the current robot action
        GoToRest,
        RowSwitched,       // optimal row changed to follow the human
        RowInfeasible,     // row abandoned after failure
        StaleEvent,        // event matched nothing feasible
        ProcessStopped,
    };
    Kind kind;
    std::string detail;
};

std::string to_string(Directive::Kind k);

/// The reasoning loop state: drives query -> table -> select -> ground ->
/// dispatch cycles against the graph engine and adapts to events. One
/// sequential state machine; branch simulations are independent of it.
class CooperationEngine {
public:
    CooperationEngine(HierGraph& model, ActionLibrary lib, WorldState world, AgentRoster roster);

    /// Runs one online phase with all staged events and rebuilds the table.
    PhaseStatus query();
    const ActionStateTable& table() const { return table_; }
    const WorldState& world() const { return world_; }
    const AgentRoster& roster() const { return roster_; }
    const ActionLibrary& library() const { return lib_; }
    HierGraph& model() { return model_; }

    /// Feasible nodes whose processes are all deactivated; staged as met for
    /// the next query. Returns (graph, node) pairs, empty when none.
    std::vector<std::pair<std::string, std::string>> stage_met_states();

    enum class SelectOutcome { NoRows, Waiting, Grounded, RowInfeasible };
    struct Selection {
        SelectOutcome outcome = SelectOutcome::NoRows;
        std::size_t row = 0;
    };
    /// Picks the optimal row and grounds it if needed. RowInfeasible means
    /// every decision-tree branch failed; the row has been reported
    /// infeasible to the graph and selection should be retried on the next
    /// query. Waiting means the optimal row is a node still gated by its
    /// processes.
    Selection select_and_ground();

    std::optional<std::size_t> active_row() const { return active_row_; }
    const TableRow& row(std::size_t i) const { return table_.rows()[i]; }

    /// Next undone action of the active row, if any; marks it dispatched.
    std::optional<NextAction> dispatch_next();
    bool robot_dispatch_active() const;

    std::vector<Directive> handle_event(const Event& ev);

private:
    // The chosen row survives re-queries until it completes, fails or a
    // human override switches it; otherwise every query would fall back to
    // the cheapest row and abandon the one being followed.
    struct Committed {
        std::string graph;
        std::string item;
        Substitution grounding;
        std::vector<std::vector<std::string>> assignees;
    };

    void commit(std::size_t row_index);
    void complete_step(std::size_t row_index, std::size_t step, std::vector<Directive>& out);
    bool try_switch_to_row(std::size_t row_index, const Event& ev, std::vector<Directive>& out);
    void mark_row_infeasible(std::size_t row_index, std::vector<Directive>& out);

    HierGraph& model_;
    ActionLibrary lib_;
    WorldState world_;
    AgentRoster roster_;
    ActionStateTable table_;
    HierEvents staged_;
    std::optional<Committed> committed_;
    std::optional<std::size_t> active_row_;
    std::optional<std::size_t> dispatched_step_;
};

}  // namespace coop

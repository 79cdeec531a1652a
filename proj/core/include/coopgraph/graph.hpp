#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coopgraph/fol.hpp"

namespace coop {

class UnknownNode : public ModelError {
public:
    using ModelError::ModelError;
};
class UnknownHyperarc : public ModelError {
public:
    using ModelError::ModelError;
};
class ModelTooLarge : public ModelError {
public:
    using ModelError::ModelError;
};

/// One entry of an hyper-arc's ordered action list. `done_seq` records the
/// order in which completions arrived so out-of-order execution is detectable.
struct ActionInstance {
    std::string name;
    bool done = false;
    int done_seq = -1;
};

/// Sustained behaviour attached to a node; must be deactivated before the
/// node can be met. Activation bookkeeping only, no control.
struct ProcessFlag {
    std::string name;
    bool active = true;
};

struct NodeSpec {
    std::string id;
    State state;
    std::vector<std::string> processes;
    double weight = 0;
};

struct ArcSpec {
    std::string id;
    std::vector<std::string> children;
    std::string parent;
    std::vector<std::string> actions;
    double weight = 0;
    std::string where;  // file:line when parsed from a model file
};

/// Plain description of a graph, as parsed from a model file or produced by
/// a generator. Validated before an AndOrGraph is built from it.
struct GraphSpec {
    std::string id;
    std::vector<NodeSpec> nodes;
    std::vector<ArcSpec> arcs;
};

struct Violation {
    enum class Code {
        DuplicateId,
        UnknownNodeRef,
        EmptyChildren,
        SelfLoop,
        MultipleRoots,
        NoRoot,
        Cycle,
        NegativeWeight,
    };
    Code code;
    std::string detail;
};

std::string to_string(Violation::Code code);

/// Structural checks: ids resolve, weights non-negative, children non-empty,
/// no self loops, exactly one root, acyclic. Empty result means valid.
std::vector<Violation> validate_graph(const GraphSpec& spec);

struct Suggestion {
    std::string item;   // node or hyper-arc id
    bool is_arc = false;
    double cost = 0;
};

enum class PhaseStatus { Solved, Failed, Suggestions };

struct PhaseResult {
    PhaseStatus status = PhaseStatus::Suggestions;
    std::vector<Suggestion> suggestions;  // sorted by (cost, id)
};

/// A cooperation path with node/arc ids materialised, for inspection and
/// tests. Internally paths are kept as index vectors.
struct CooperationPath {
    std::vector<std::string> nodes;
    std::vector<std::string> hyperarcs;
    double cost = 0;  // current cost: weights of not-yet-met/solved members
};

class HierGraph;

/// Single-layer AND/OR graph engine. Nodes carry met/feasible flags and
/// weights, hyper-arcs carry solved/feasible flags, ordered actions and
/// weights. The cooperation-path set is enumerated once after construction;
/// costs are updated incrementally as members become met or solved.
///
/// One writer at a time; const queries may run concurrently between
/// mutations.
class AndOrGraph {
    friend class HierGraph;  // index-based access on the layer hot paths

public:
    static constexpr std::size_t kDefaultPathCap = 1'000'000;

    /// Requires a spec that passed validate_graph. Enumerates cooperation
    /// paths and computes the initial feasibility sets.
    explicit AndOrGraph(const GraphSpec& spec, std::size_t path_cap = kDefaultPathCap);

    const std::string& id() const { return id_; }

    // --- structure ------------------------------------------------------
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t arc_count() const { return arcs_.size(); }
    const std::string& root() const;
    bool has_node(const std::string& id) const;
    bool has_arc(const std::string& id) const;
    std::vector<std::string> node_ids() const;
    std::vector<std::string> arc_ids() const;
    const std::vector<std::string>& children_of(const std::string& arc) const;
    const std::string& parent_of(const std::string& arc) const;
    std::vector<std::string> leaves() const;
    const State& node_state(const std::string& node) const;
    double node_weight(const std::string& node) const;
    double arc_weight(const std::string& arc) const;
    const std::vector<ActionInstance>& arc_actions(const std::string& arc) const;
    const std::vector<ProcessFlag>& node_processes(const std::string& node) const;

    // --- status flags ----------------------------------------------------
    bool met(const std::string& node) const;
    bool solved(const std::string& arc) const;
    bool feasible_node(const std::string& node) const;
    bool feasible_arc(const std::string& arc) const;
    bool solved() const;  // root met
    std::vector<std::string> feasible_nodes() const;   // N_f, declaration order
    std::vector<std::string> feasible_arcs() const;    // H_f, declaration order
    std::size_t feasible_count() const { return feasible_node_count_ + feasible_arc_count_; }

    // --- paths -----------------------------------------------------------
    std::size_t path_count() const { return paths_.size(); }
    std::vector<CooperationPath> cooperation_paths() const;
    /// Current cost of one enumerated path, recomputed from member flags.
    double path_cost(std::size_t path_index) const;
    /// Incrementally maintained cost, kept equal to path_cost().
    double path_cost_cached(std::size_t path_index) const;
    /// Minimum current cost over all cooperation paths.
    double min_path_cost() const;
    /// Minimum current cost over paths containing the item.
    double min_cost_through_node(const std::string& node) const;
    double min_cost_through_arc(const std::string& arc) const;

    // --- online calculus (Algorithms 1-4) ---------------------------------
    /// Marks the node met when it is feasible and all its processes are
    /// deactivated; no-op returning false otherwise (stale events allowed).
    bool mark_node_met(const std::string& node);
    /// Marks the arc solved when it is feasible and all its actions are done
    /// in list order; no-op returning false otherwise.
    bool mark_hyperarc_solved(const std::string& arc);
    void update_node_feasibility(const std::string& node);
    void update_hyperarc_feasibility(const std::string& arc);
    /// Marks one action done, recording arrival order.
    void mark_action_done(const std::string& arc, const std::string& action);
    /// Marks all undone actions done in list order (used by replay harnesses).
    void complete_actions(const std::string& arc);
    void deactivate_process(const std::string& node, const std::string& process);
    bool all_processes_inactive(const std::string& node) const;
    /// Permanently removes the item from the feasible sets (failed rows).
    void force_unfeasible_node(const std::string& node);
    void force_unfeasible_arc(const std::string& arc);

    /// One suggestion per feasible node and hyper-arc, each at the minimum
    /// current cost over the cooperation paths containing it.
    std::vector<Suggestion> find_suggestions() const;

    /// Algorithm 4: applies met/solved events, then reports Solved, Failed,
    /// or the updated suggestion set.
    PhaseResult online_phase(std::span<const std::string> met_nodes,
                             std::span<const std::string> solved_arcs);

    /// Computes the initial feasibility sets (leaves feasible). Called by the
    /// constructor for standalone graphs; hierarchical layers defer it until
    /// their upper hyper-arc becomes feasible.
    void initial_feasibility();
    /// Drops all feasibility; used when an enclosing layer abandons this one.
    void clear_feasibility();

    // Hierarchy hooks: transitioned arcs use an optimistic weight that tracks
    // the lower graph; changing it keeps cached path costs consistent.
    void set_arc_effective_weight(const std::string& arc, double w);
    double arc_effective_weight(const std::string& arc) const;
    /// Marks a transitioned arc solved because its lower graph solved,
    /// bypassing the action-order gate.
    void solve_arc_via_transition(const std::string& arc);

private:
    struct NodeRec {
        NodeSpec spec;
        bool met = false;
        bool feasible = false;
        bool locked = false;
        std::vector<ProcessFlag> processes;
        std::vector<std::uint32_t> arcs_as_child;   // arcs h with n in N_c(h)
        std::vector<std::uint32_t> arcs_as_parent;  // arcs h with n = N_p(h)
        std::vector<std::uint32_t> paths;           // paths containing n
    };
    struct ArcRec {
        ArcSpec spec;
        double effective_weight = 0;
        bool solved = false;
        bool feasible = false;
        bool locked = false;
        bool transitioned = false;  // solved only through its lower graph
        std::vector<ActionInstance> actions;
        std::vector<std::uint32_t> children;
        std::uint32_t parent = 0;
        std::vector<std::uint32_t> paths;
        int next_done_seq = 0;
    };
    struct PathRec {
        std::vector<std::uint32_t> nodes;  // sorted
        std::vector<std::uint32_t> arcs;   // sorted
        double current_cost = 0;
    };

    std::uint32_t node_index(const std::string& id) const;
    std::uint32_t arc_index(const std::string& id) const;
    bool unsolved_arc_feasible(std::uint32_t h) const;
    void set_node_feasible(std::uint32_t n, bool value);
    void set_arc_feasible(std::uint32_t h, bool value);
    void update_node_feasibility(std::uint32_t n);
    void update_hyperarc_feasibility(std::uint32_t h);
    void subtract_from_paths_node(std::uint32_t n);
    void subtract_from_paths_arc(std::uint32_t h);
    void set_arc_effective_weight_idx(std::uint32_t h, double w);
    void solve_arc_via_transition_idx(std::uint32_t h);
    void force_unfeasible_arc_idx(std::uint32_t h);
    void enumerate_paths(std::size_t cap);

    std::string id_;
    std::vector<NodeRec> nodes_;
    std::vector<ArcRec> arcs_;
    std::unordered_map<std::string, std::uint32_t> node_by_id_;
    std::unordered_map<std::string, std::uint32_t> arc_by_id_;
    std::uint32_t root_ = 0;
    std::vector<PathRec> paths_;
    std::size_t feasible_node_count_ = 0;
    std::size_t feasible_arc_count_ = 0;
};

}  // namespace coop

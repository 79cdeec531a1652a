#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coopgraph/graph.hpp"

namespace coop {

class MappingViolation : public ModelError {
public:
    using ModelError::ModelError;
};
class CycleAcrossLayers : public ModelError {
public:
    using ModelError::ModelError;
};
class NoTransition : public ModelError {
public:
    using ModelError::ModelError;
};

/// Declared connection between an upper hyper-arc and a lower graph
/// description, with the leaf (M1) and root (M2) node mappings.
struct TransitionSpec {
    std::string upper_graph;  // description id
    std::string upper_arc;
    std::string lower_graph;  // description id
    std::map<std::string, std::vector<std::string>> leaf_map;  // upper child -> lower leaves
    std::string upper_parent;  // MAPROOT left side
    std::string lower_root;    // MAPROOT right side
};

/// A full hierarchical model description: graph templates plus transitions.
struct HierSpec {
    std::vector<GraphSpec> graphs;
    std::vector<TransitionSpec> transitions;
};

struct HierSuggestion {
    std::string item;
    bool is_arc = false;
    double cost = 0;
    std::string graph;  // instance id
};

struct HierPhaseResult {
    PhaseStatus status = PhaseStatus::Suggestions;
    std::vector<HierSuggestion> suggestions;  // sorted by (cost, graph, item)
};

/// Per-graph event batches for one online step, keyed by instance id.
struct HierEvents {
    std::map<std::string, std::vector<std::string>> met_nodes;
    std::map<std::string, std::vector<std::string>> solved_arcs;
};

/// Hierarchical AND/OR graph: an ordered set of graph instances connected by
/// transitions. Descriptions may be shared by several upper hyper-arcs; each
/// use gets its own runtime instance. Transitioned arcs carry an optimistic
/// weight equal to the lowest current cooperation-path cost of their lower
/// instance, refreshed at every online step.
class HierGraph {
public:
    struct TransitionLink {
        std::uint32_t arc_index = 0;  // within the upper instance's graph
        std::string arc_id;
        int lower = 0;          // instance index
        bool dormant = false;   // solved and cleaned up; no rule fires again
    };

    struct Instance {
        std::string instance_id;
        std::string desc_id;
        int depth = 0;
        int upper_instance = -1;  // index into instances(), -1 for the root
        std::string upper_arc;
        bool activated = false;
        std::map<std::string, int> lower_of_arc;  // arc id -> instance index
        std::vector<TransitionLink> links;        // same content, index-keyed
        std::vector<int> lower_by_arc_index;      // arc index -> instance, -1 none
        std::unique_ptr<AndOrGraph> graph;
    };

    /// Builds all instances bottom-up, validates every layer and transition
    /// (including semantic equivalence of the declared mappings), and
    /// computes initial optimistic weights.
    static HierGraph offline(const HierSpec& spec,
                             std::size_t path_cap = AndOrGraph::kDefaultPathCap);
    /// Wraps one standalone graph as a degenerate hierarchy.
    static HierGraph single(const GraphSpec& spec,
                            std::size_t path_cap = AndOrGraph::kDefaultPathCap);

    std::size_t instance_count() const { return instances_.size(); }
    /// Instances in depth order (the root graph first).
    std::vector<int> layer_order() const { return layer_order_; }
    const Instance& instance(int index) const { return instances_[index]; }
    const Instance& instance(const std::string& instance_id) const;
    bool has_instance(const std::string& instance_id) const;
    AndOrGraph& graph(const std::string& instance_id);
    const AndOrGraph& graph(const std::string& instance_id) const;
    const std::string& root_instance_id() const;
    int max_depth() const;
    std::size_t spawned_nodes() const;
    std::size_t spawned_arcs() const;

    /// Transition target of a hyper-arc, if any.
    std::optional<std::string> lower_graph(const std::string& instance_id,
                                           const std::string& arc) const;
    /// Inverse of lower_graph; absent for the root instance.
    std::optional<std::pair<std::string, std::string>> upper_hyperarc(
        const std::string& instance_id) const;

    /// Optimistic weight: minimum current cooperation-path cost of the lower
    /// instance. Throws NoTransition when the arc has no transition.
    double hier_weight(const std::string& instance_id, const std::string& arc) const;

    /// Enforces the feasibility/solved biconditionals across every
    /// transition until a fixpoint: lower solved -> upper solved; upper
    /// feasible -> lower leaves feasible; lower failed -> upper unfeasible;
    /// upper unfeasible -> lower abandoned.
    void propagate_feasibility();

    /// Algorithm 5: applies the met/solved batches per graph, propagates
    /// across layers, refreshes optimistic weights, and reports Solved,
    /// Failed or the hierarchical suggestion set.
    HierPhaseResult online_hierarchical_phase(const HierEvents& events);

    /// Algorithm 6: one suggestion per feasible item anywhere in the
    /// hierarchy, costs adjusted through the transition chain
    /// (cost = upper cost - w(h) + lower item cost at every level).
    std::vector<HierSuggestion> find_suggestions_hier() const;

    bool solved() const;
    std::size_t total_feasible() const;

    /// Permanently removes an item from the feasible sets and propagates the
    /// consequences across layers.
    void force_unfeasible(const std::string& instance_id, const std::string& item, bool is_arc);

private:
    HierGraph() = default;
    void refresh_hier_weights();
    void deactivate_subtree(int index);
    int instance_index(const std::string& instance_id) const;

    std::vector<Instance> instances_;
    std::map<std::string, int> by_id_;
    std::vector<int> layer_order_;  // indices sorted by (depth, creation)
    int root_index_ = 0;
};

}  // namespace coop

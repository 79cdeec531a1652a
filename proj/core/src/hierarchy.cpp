#include "coopgraph/hierarchy.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace coop {

namespace {

/// Literal-level correspondence derived from a declared node mapping: every
/// literal of the upper node stands for all literals of its mapped lower
/// nodes.
std::vector<LiteralCorrespondence> derive_correspondences(
    const std::vector<const State*>& upper,
    const std::vector<std::vector<const State*>>& lower_per_upper) {
    std::vector<LiteralCorrespondence> out;
    for (std::size_t i = 0; i < upper.size(); ++i) {
        std::vector<Literal> lowers;
        for (const State* s : lower_per_upper[i]) {
            lowers.insert(lowers.end(), s->literals().begin(), s->literals().end());
        }
        for (const Literal& u : upper[i]->literals()) {
            out.push_back({u, lowers});
        }
    }
    return out;
}

}  // namespace

HierGraph HierGraph::single(const GraphSpec& spec, std::size_t path_cap) {
    HierGraph h;
    Instance inst;
    inst.instance_id = spec.id;
    inst.desc_id = spec.id;
    inst.depth = 0;
    inst.activated = true;
    inst.graph = std::make_unique<AndOrGraph>(spec, path_cap);
    inst.lower_by_arc_index.assign(inst.graph->arc_count(), -1);
    h.instances_.push_back(std::move(inst));
    h.by_id_.emplace(spec.id, 0);
    h.layer_order_ = {0};
    h.root_index_ = 0;
    return h;
}

HierGraph HierGraph::offline(const HierSpec& spec, std::size_t path_cap) {
    std::map<std::string, const GraphSpec*> descs;
    for (const GraphSpec& g : spec.graphs) {
        if (!descs.emplace(g.id, &g).second) {
            throw ModelError("duplicate graph id " + g.id);
        }
    }
    // Transitions keyed by (upper desc, arc); at most one per hyper-arc.
    std::map<std::pair<std::string, std::string>, const TransitionSpec*> by_arc;
    std::set<std::string> lowered;
    for (const TransitionSpec& t : spec.transitions) {
        if (!descs.count(t.upper_graph)) {
            throw ModelError("transition references unknown graph " + t.upper_graph);
        }
        if (!descs.count(t.lower_graph)) {
            throw ModelError("transition references unknown lower graph " + t.lower_graph);
        }
        if (!by_arc.emplace(std::make_pair(t.upper_graph, t.upper_arc), &t).second) {
            throw ModelError("hyper-arc " + t.upper_graph + "." + t.upper_arc +
                             " has more than one transition");
        }
        lowered.insert(t.lower_graph);
    }
    // The root description is the one never used as a lower graph.
    std::vector<std::string> roots;
    for (const GraphSpec& g : spec.graphs) {
        if (!lowered.count(g.id)) roots.push_back(g.id);
    }
    if (roots.size() != 1) {
        throw ModelError(roots.empty()
                             ? "no root graph: every graph is a lower graph of some transition"
                             : "transitions leave more than one root graph");
    }

    HierGraph h;
    std::map<std::string, int> instance_counter;
    std::vector<std::string> desc_stack;

    std::function<int(const std::string&, int, int, const std::string&)> build =
        [&](const std::string& desc_id, int depth, int upper_inst,
            const std::string& upper_arc) -> int {
        if (std::find(desc_stack.begin(), desc_stack.end(), desc_id) != desc_stack.end()) {
            throw CycleAcrossLayers("graph " + desc_id + " is (transitively) its own lower graph");
        }
        desc_stack.push_back(desc_id);
        const GraphSpec& g = *descs.at(desc_id);

        // Build lower instances first so optimistic weights are available
        // before this layer's cooperation paths are enumerated.
        std::map<std::string, int> lower_of_arc;
        std::map<std::string, double> weight_override;
        for (const ArcSpec& arc : g.arcs) {
            auto it = by_arc.find(std::make_pair(desc_id, arc.id));
            if (it == by_arc.end()) continue;
            const TransitionSpec& t = *it->second;
            int low = build(t.lower_graph, depth + 1, -1, arc.id);
            lower_of_arc.emplace(arc.id, low);
            weight_override.emplace(arc.id, h.instances_[low].graph->min_path_cost());
        }

        Instance inst;
        inst.desc_id = desc_id;
        int seq = ++instance_counter[desc_id];
        inst.instance_id = seq == 1 ? desc_id : desc_id + "#" + std::to_string(seq);
        inst.depth = depth;
        inst.upper_instance = upper_inst;
        inst.upper_arc = upper_arc;
        inst.lower_of_arc = lower_of_arc;
        inst.graph = std::make_unique<AndOrGraph>(g, path_cap);
        for (const auto& [arc, w] : weight_override) {
            inst.graph->set_arc_effective_weight(arc, w);
        }
        inst.lower_by_arc_index.assign(inst.graph->arc_count(), -1);
        for (const auto& [arc_id, low] : lower_of_arc) {
            std::uint32_t ai = inst.graph->arc_index(arc_id);
            inst.links.push_back({ai, arc_id, low, false});
            inst.lower_by_arc_index[ai] = low;
            inst.graph->arcs_[ai].transitioned = true;
        }

        // Validate the transition mappings against the built structure.
        for (const ArcSpec& arc : g.arcs) {
            auto it = by_arc.find(std::make_pair(desc_id, arc.id));
            if (it == by_arc.end()) continue;
            const TransitionSpec& t = *it->second;
            const AndOrGraph& lower = *h.instances_[lower_of_arc.at(arc.id)].graph;
            const AndOrGraph& upper = *inst.graph;
            if (t.upper_parent.empty() || t.lower_root.empty()) {
                throw MappingViolation("transition " + desc_id + "." + arc.id +
                                       " is missing its MAPROOT declaration");
            }
            if (t.upper_parent != arc.parent) {
                throw MappingViolation("MAPROOT of " + desc_id + "." + arc.id +
                                       " names " + t.upper_parent + " but the parent is " +
                                       arc.parent);
            }
            if (t.lower_root != lower.root()) {
                throw MappingViolation("MAPROOT of " + desc_id + "." + arc.id + " names " +
                                       t.lower_root + " but the lower root is " + lower.root());
            }
            std::set<std::string> lower_leaves;
            for (const std::string& l : lower.leaves()) lower_leaves.insert(l);
            std::set<std::string> covered;
            std::vector<const State*> upper_states;
            std::vector<std::vector<const State*>> lower_states;
            for (const std::string& child : arc.children) {
                auto mit = t.leaf_map.find(child);
                if (mit == t.leaf_map.end()) {
                    throw MappingViolation("transition " + desc_id + "." + arc.id +
                                           " has no MAPLEAF for child " + child);
                }
                upper_states.push_back(&upper.node_state(child));
                lower_states.emplace_back();
                for (const std::string& leaf : mit->second) {
                    if (!lower_leaves.count(leaf)) {
                        throw MappingViolation("MAPLEAF of " + desc_id + "." + arc.id +
                                               " maps to " + leaf +
                                               " which is not a leaf of " + t.lower_graph);
                    }
                    covered.insert(leaf);
                    lower_states.back().push_back(&lower.node_state(leaf));
                }
            }
            for (const auto& [child, leaves] : t.leaf_map) {
                if (std::find(arc.children.begin(), arc.children.end(), child) ==
                    arc.children.end()) {
                    throw MappingViolation("MAPLEAF of " + desc_id + "." + arc.id +
                                           " names " + child + " which is not a child of " +
                                           arc.id);
                }
                (void)leaves;
            }
            if (covered.size() != lower_leaves.size()) {
                for (const std::string& leaf : lower_leaves) {
                    if (!covered.count(leaf)) {
                        throw MappingViolation("transition " + desc_id + "." + arc.id +
                                               " leaves lower leaf " + leaf + " unmapped");
                    }
                }
            }
            // Semantic equivalence of both mappings.
            std::vector<State> a, b;
            for (const State* s : upper_states) a.push_back(*s);
            for (const auto& group : lower_states) {
                for (const State* s : group) b.push_back(*s);
            }
            auto corr = derive_correspondences(upper_states, lower_states);
            if (!semantically_equivalent(a, b, corr)) {
                throw MappingViolation("leaf mapping of " + desc_id + "." + arc.id +
                                       " is not semantically equivalent");
            }
            std::vector<State> pa{upper.node_state(arc.parent)};
            std::vector<State> pb{lower.node_state(lower.root())};
            auto root_corr = derive_correspondences({&pa[0]}, {{&pb[0]}});
            if (!semantically_equivalent(pa, pb, root_corr)) {
                throw MappingViolation("root mapping of " + desc_id + "." + arc.id +
                                       " is not semantically equivalent");
            }
        }

        int index = static_cast<int>(h.instances_.size());
        h.instances_.push_back(std::move(inst));
        desc_stack.pop_back();
        return index;
    };

    int root_idx = build(roots[0], 0, -1, "");
    h.root_index_ = root_idx;

    // Wire upper_instance links (children were built before their parents)
    // and fix depths from the root downwards.
    std::function<void(int)> wire = [&](int idx) {
        for (const auto& [arc, low] : h.instances_[idx].lower_of_arc) {
            h.instances_[low].upper_instance = idx;
            h.instances_[low].depth = h.instances_[idx].depth + 1;
            wire(low);
        }
    };
    h.instances_[root_idx].depth = 0;
    wire(root_idx);

    for (int i = 0; i < static_cast<int>(h.instances_.size()); ++i) {
        h.by_id_.emplace(h.instances_[i].instance_id, i);
        h.layer_order_.push_back(i);
        // Only the root layer starts with its leaves feasible; deeper layers
        // activate when their upper hyper-arc becomes feasible.
        if (i != root_idx) {
            h.instances_[i].graph->clear_feasibility();
        } else {
            h.instances_[i].activated = true;
        }
    }
    std::stable_sort(h.layer_order_.begin(), h.layer_order_.end(), [&](int a, int b) {
        return h.instances_[a].depth < h.instances_[b].depth;
    });
    h.propagate_feasibility();
    return h;
}

int HierGraph::instance_index(const std::string& instance_id) const {
    auto it = by_id_.find(instance_id);
    if (it == by_id_.end()) throw ModelError("unknown graph instance " + instance_id);
    return it->second;
}

const HierGraph::Instance& HierGraph::instance(const std::string& instance_id) const {
    return instances_[instance_index(instance_id)];
}

bool HierGraph::has_instance(const std::string& instance_id) const {
    return by_id_.count(instance_id) > 0;
}

AndOrGraph& HierGraph::graph(const std::string& instance_id) {
    return *instances_[instance_index(instance_id)].graph;
}

const AndOrGraph& HierGraph::graph(const std::string& instance_id) const {
    return *instances_[instance_index(instance_id)].graph;
}

const std::string& HierGraph::root_instance_id() const {
    return instances_[root_index_].instance_id;
}

int HierGraph::max_depth() const {
    int d = 0;
    for (const Instance& i : instances_) d = std::max(d, i.depth);
    return d;
}

std::size_t HierGraph::spawned_nodes() const {
    std::size_t n = 0;
    for (const Instance& i : instances_) n += i.graph->node_count();
    return n;
}

std::size_t HierGraph::spawned_arcs() const {
    std::size_t n = 0;
    for (const Instance& i : instances_) n += i.graph->arc_count();
    return n;
}

std::optional<std::string> HierGraph::lower_graph(const std::string& instance_id,
                                                  const std::string& arc) const {
    const Instance& inst = instances_[instance_index(instance_id)];
    auto it = inst.lower_of_arc.find(arc);
    if (it == inst.lower_of_arc.end()) return std::nullopt;
    return instances_[it->second].instance_id;
}

std::optional<std::pair<std::string, std::string>> HierGraph::upper_hyperarc(
    const std::string& instance_id) const {
    const Instance& inst = instances_[instance_index(instance_id)];
    if (inst.upper_instance < 0) return std::nullopt;
    return std::make_pair(instances_[inst.upper_instance].instance_id, inst.upper_arc);
}

double HierGraph::hier_weight(const std::string& instance_id, const std::string& arc) const {
    const Instance& inst = instances_[instance_index(instance_id)];
    auto it = inst.lower_of_arc.find(arc);
    if (it == inst.lower_of_arc.end()) {
        throw NoTransition("hyper-arc " + arc + " of " + instance_id + " has no transition");
    }
    return instances_[it->second].graph->min_path_cost();
}

void HierGraph::deactivate_subtree(int index) {
    Instance& inst = instances_[index];
    inst.graph->clear_feasibility();
    for (const TransitionLink& link : inst.links) deactivate_subtree(link.lower);
}

void HierGraph::propagate_feasibility() {
    bool changed = true;
    while (changed) {
        changed = false;
        for (int idx : layer_order_) {
            Instance& upper = instances_[idx];
            AndOrGraph& ug = *upper.graph;
            for (TransitionLink& link : upper.links) {
                if (link.dormant) continue;
                Instance& lower = instances_[link.lower];
                AndOrGraph& lg = *lower.graph;
                AndOrGraph::ArcRec& arc = ug.arcs_[link.arc_index];
                if (lg.solved() && !arc.solved) {
                    // solved(G^{l+1}) -> solved(h^l), with the optimistic
                    // weight refreshed first so cost bookkeeping stays exact.
                    ug.set_arc_effective_weight_idx(link.arc_index, lg.min_path_cost());
                    ug.solve_arc_via_transition_idx(link.arc_index);
                    ug.update_hyperarc_feasibility(link.arc_index);
                    deactivate_subtree(link.lower);
                    link.dormant = true;  // solved and cleaned up: terminal
                    changed = true;
                    continue;
                }
                if (arc.feasible && !lower.activated) {
                    lower.activated = true;
                    lg.initial_feasibility();
                    changed = true;
                }
                if (lower.activated && !lg.solved() && lg.feasible_count() == 0 &&
                    arc.feasible) {
                    // lower graph failed -> upper hyper-arc unfeasible
                    ug.force_unfeasible_arc_idx(link.arc_index);
                    changed = true;
                }
                if (!arc.feasible && !arc.solved && lower.activated &&
                    lg.feasible_count() > 0) {
                    // upper hyper-arc abandoned -> lower subtree abandoned
                    deactivate_subtree(link.lower);
                    changed = true;
                }
            }
        }
    }
}

void HierGraph::refresh_hier_weights() {
    for (auto it = layer_order_.rbegin(); it != layer_order_.rend(); ++it) {
        Instance& upper = instances_[*it];
        for (const TransitionLink& link : upper.links) {
            if (link.dormant) continue;
            upper.graph->set_arc_effective_weight_idx(
                link.arc_index, instances_[link.lower].graph->min_path_cost());
        }
    }
}

HierPhaseResult HierGraph::online_hierarchical_phase(const HierEvents& events) {
    // Met-node updates per graph; a non-root graph that becomes solved marks
    // its upper hyper-arc solved (Algorithm 5 lines 3-12, handled in the
    // propagation pass).
    for (const auto& [gid, nodes] : events.met_nodes) {
        Instance& inst = instances_[instance_index(gid)];
        for (const std::string& n : nodes) {
            inst.graph->mark_node_met(n);
            inst.graph->update_node_feasibility(n);
        }
    }
    propagate_feasibility();
    for (const auto& [gid, arcs] : events.solved_arcs) {
        Instance& inst = instances_[instance_index(gid)];
        for (const std::string& h : arcs) {
            inst.graph->mark_hyperarc_solved(h);
            inst.graph->update_hyperarc_feasibility(h);
        }
    }
    propagate_feasibility();
    if (solved()) return {PhaseStatus::Solved, {}};
    refresh_hier_weights();
    if (total_feasible() == 0) return {PhaseStatus::Failed, {}};
    return {PhaseStatus::Suggestions, find_suggestions_hier()};
}

std::vector<HierSuggestion> HierGraph::find_suggestions_hier() const {
    std::vector<HierSuggestion> out;
    std::function<void(int, double)> collect = [&](int idx, double offset) {
        const Instance& inst = instances_[idx];
        const AndOrGraph& g = *inst.graph;
        for (const AndOrGraph::NodeRec& n : g.nodes_) {
            if (!n.feasible) continue;
            double best = std::numeric_limits<double>::infinity();
            for (std::uint32_t pid : n.paths) {
                best = std::min(best, g.paths_[pid].current_cost);
            }
            out.push_back({n.spec.id, false, offset + best, inst.instance_id});
        }
        for (std::uint32_t h = 0; h < g.arcs_.size(); ++h) {
            const AndOrGraph::ArcRec& arc = g.arcs_[h];
            if (!arc.feasible) continue;
            double best = std::numeric_limits<double>::infinity();
            for (std::uint32_t pid : arc.paths) {
                best = std::min(best, g.paths_[pid].current_cost);
            }
            double cost = offset + best;
            int low = inst.lower_by_arc_index[h];
            if (low < 0) {
                out.push_back({arc.spec.id, true, cost, inst.instance_id});
            } else {
                // Recursive suggestions replace the transitioned hyper-arc:
                // cost <- cost - w(h) + c(x) for each lower item x.
                collect(low, cost - arc.effective_weight);
            }
        }
    };
    collect(root_index_, 0.0);
    std::sort(out.begin(), out.end(), [](const HierSuggestion& a, const HierSuggestion& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.graph != b.graph) return a.graph < b.graph;
        return a.item < b.item;
    });
    return out;
}

bool HierGraph::solved() const { return instances_[root_index_].graph->solved(); }

std::size_t HierGraph::total_feasible() const {
    std::size_t n = 0;
    for (const Instance& i : instances_) n += i.graph->feasible_count();
    return n;
}

void HierGraph::force_unfeasible(const std::string& instance_id, const std::string& item,
                                 bool is_arc) {
    AndOrGraph& g = graph(instance_id);
    if (is_arc) {
        g.force_unfeasible_arc(item);
    } else {
        g.force_unfeasible_node(item);
    }
    propagate_feasibility();
}

}  // namespace coop

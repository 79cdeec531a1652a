#include "coopgraph/graph.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace coop {

std::string to_string(Violation::Code code) {
    switch (code) {
        case Violation::Code::DuplicateId: return "DuplicateId";
        case Violation::Code::UnknownNodeRef: return "UnknownNodeRef";
        case Violation::Code::EmptyChildren: return "EmptyChildren";
        case Violation::Code::SelfLoop: return "SelfLoop";
        case Violation::Code::MultipleRoots: return "MultipleRoots";
        case Violation::Code::NoRoot: return "NoRoot";
        case Violation::Code::Cycle: return "Cycle";
        case Violation::Code::NegativeWeight: return "NegativeWeight";
    }
    return "Unknown";
}

std::vector<Violation> validate_graph(const GraphSpec& spec) {
    std::vector<Violation> out;
    std::unordered_map<std::string, std::size_t> node_idx;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const NodeSpec& n = spec.nodes[i];
        if (!node_idx.emplace(n.id, i).second) {
            out.push_back({Violation::Code::DuplicateId, "node " + n.id});
        }
        if (n.weight < 0) {
            out.push_back({Violation::Code::NegativeWeight, "node " + n.id});
        }
    }
    std::set<std::string> arc_ids;
    bool refs_ok = true;
    for (const ArcSpec& h : spec.arcs) {
        if (!arc_ids.insert(h.id).second) {
            out.push_back({Violation::Code::DuplicateId, "arc " + h.id});
        }
        if (h.weight < 0) {
            out.push_back({Violation::Code::NegativeWeight, "arc " + h.id});
        }
        if (h.children.empty()) {
            out.push_back({Violation::Code::EmptyChildren, "arc " + h.id});
        }
        if (!node_idx.count(h.parent)) {
            out.push_back({Violation::Code::UnknownNodeRef, "arc " + h.id + " parent " + h.parent});
            refs_ok = false;
        }
        for (const std::string& c : h.children) {
            if (!node_idx.count(c)) {
                out.push_back({Violation::Code::UnknownNodeRef, "arc " + h.id + " child " + c});
                refs_ok = false;
            }
            if (c == h.parent) {
                out.push_back({Violation::Code::SelfLoop, "arc " + h.id});
            }
        }
    }
    if (!refs_ok) return out;

    std::vector<bool> is_child(spec.nodes.size(), false);
    for (const ArcSpec& h : spec.arcs) {
        for (const std::string& c : h.children) is_child[node_idx.at(c)] = true;
    }
    std::vector<std::string> roots;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        if (!is_child[i]) roots.push_back(spec.nodes[i].id);
    }
    if (roots.empty() && !spec.nodes.empty()) {
        out.push_back({Violation::Code::NoRoot, spec.id});
    } else if (roots.size() > 1) {
        std::string detail;
        for (const std::string& r : roots) detail += (detail.empty() ? "" : ",") + r;
        out.push_back({Violation::Code::MultipleRoots, detail});
    }

    // Cycle check over child -> parent edges.
    std::vector<std::vector<std::size_t>> up(spec.nodes.size());
    for (const ArcSpec& h : spec.arcs) {
        std::size_t p = node_idx.at(h.parent);
        for (const std::string& c : h.children) up[node_idx.at(c)].push_back(p);
    }
    std::vector<int> mark(spec.nodes.size(), 0);  // 0 new, 1 on stack, 2 done
    bool cyclic = false;
    std::function<void(std::size_t)> dfs = [&](std::size_t v) {
        mark[v] = 1;
        for (std::size_t w : up[v]) {
            if (mark[w] == 1) cyclic = true;
            else if (mark[w] == 0) dfs(w);
            if (cyclic) return;
        }
        mark[v] = 2;
    };
    for (std::size_t v = 0; v < spec.nodes.size() && !cyclic; ++v) {
        if (mark[v] == 0) dfs(v);
    }
    if (cyclic) out.push_back({Violation::Code::Cycle, spec.id});
    return out;
}

AndOrGraph::AndOrGraph(const GraphSpec& spec, std::size_t path_cap) : id_(spec.id) {
    auto violations = validate_graph(spec);
    if (!violations.empty()) {
        std::string msg = "invalid graph " + spec.id + ":";
        for (const Violation& v : violations) {
            msg += " " + to_string(v.code) + "(" + v.detail + ")";
        }
        throw ModelError(msg);
    }
    nodes_.reserve(spec.nodes.size());
    for (const NodeSpec& n : spec.nodes) {
        NodeRec rec;
        rec.spec = n;
        for (const std::string& p : n.processes) rec.processes.push_back({p, true});
        node_by_id_.emplace(n.id, static_cast<std::uint32_t>(nodes_.size()));
        nodes_.push_back(std::move(rec));
    }
    arcs_.reserve(spec.arcs.size());
    for (const ArcSpec& h : spec.arcs) {
        ArcRec rec;
        rec.spec = h;
        rec.effective_weight = h.weight;
        for (const std::string& a : h.actions) rec.actions.push_back({a, false, -1});
        rec.parent = node_by_id_.at(h.parent);
        for (const std::string& c : h.children) rec.children.push_back(node_by_id_.at(c));
        std::uint32_t idx = static_cast<std::uint32_t>(arcs_.size());
        arc_by_id_.emplace(h.id, idx);
        nodes_[rec.parent].arcs_as_parent.push_back(idx);
        for (std::uint32_t c : rec.children) nodes_[c].arcs_as_child.push_back(idx);
        arcs_.push_back(std::move(rec));
    }
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        bool is_child = !nodes_[i].arcs_as_child.empty();
        // exactly one such node exists after validation
        if (!is_child) root_ = i;
    }
    enumerate_paths(path_cap);
    initial_feasibility();
}

std::uint32_t AndOrGraph::node_index(const std::string& id) const {
    auto it = node_by_id_.find(id);
    if (it == node_by_id_.end()) throw UnknownNode("unknown node " + id + " in graph " + id_);
    return it->second;
}

std::uint32_t AndOrGraph::arc_index(const std::string& id) const {
    auto it = arc_by_id_.find(id);
    if (it == arc_by_id_.end()) throw UnknownHyperarc("unknown hyper-arc " + id + " in graph " + id_);
    return it->second;
}

const std::string& AndOrGraph::root() const { return nodes_[root_].spec.id; }
bool AndOrGraph::has_node(const std::string& id) const { return node_by_id_.count(id) > 0; }
bool AndOrGraph::has_arc(const std::string& id) const { return arc_by_id_.count(id) > 0; }

std::vector<std::string> AndOrGraph::node_ids() const {
    std::vector<std::string> out;
    out.reserve(nodes_.size());
    for (const NodeRec& n : nodes_) out.push_back(n.spec.id);
    return out;
}

std::vector<std::string> AndOrGraph::arc_ids() const {
    std::vector<std::string> out;
    out.reserve(arcs_.size());
    for (const ArcRec& h : arcs_) out.push_back(h.spec.id);
    return out;
}

const std::vector<std::string>& AndOrGraph::children_of(const std::string& arc) const {
    return arcs_[arc_index(arc)].spec.children;
}

const std::string& AndOrGraph::parent_of(const std::string& arc) const {
    return arcs_[arc_index(arc)].spec.parent;
}

std::vector<std::string> AndOrGraph::leaves() const {
    std::vector<std::string> out;
    for (const NodeRec& n : nodes_) {
        if (n.arcs_as_parent.empty()) out.push_back(n.spec.id);
    }
    return out;
}

const State& AndOrGraph::node_state(const std::string& node) const {
    return nodes_[node_index(node)].spec.state;
}
double AndOrGraph::node_weight(const std::string& node) const {
    return nodes_[node_index(node)].spec.weight;
}
double AndOrGraph::arc_weight(const std::string& arc) const {
    return arcs_[arc_index(arc)].spec.weight;
}
const std::vector<ActionInstance>& AndOrGraph::arc_actions(const std::string& arc) const {
    return arcs_[arc_index(arc)].actions;
}
const std::vector<ProcessFlag>& AndOrGraph::node_processes(const std::string& node) const {
    return nodes_[node_index(node)].processes;
}

bool AndOrGraph::met(const std::string& node) const { return nodes_[node_index(node)].met; }
bool AndOrGraph::solved(const std::string& arc) const { return arcs_[arc_index(arc)].solved; }
bool AndOrGraph::feasible_node(const std::string& node) const {
    return nodes_[node_index(node)].feasible;
}
bool AndOrGraph::feasible_arc(const std::string& arc) const {
    return arcs_[arc_index(arc)].feasible;
}
bool AndOrGraph::solved() const { return nodes_[root_].met; }

std::vector<std::string> AndOrGraph::feasible_nodes() const {
    std::vector<std::string> out;
    for (const NodeRec& n : nodes_) {
        if (n.feasible) out.push_back(n.spec.id);
    }
    return out;
}

std::vector<std::string> AndOrGraph::feasible_arcs() const {
    std::vector<std::string> out;
    for (const ArcRec& h : arcs_) {
        if (h.feasible) out.push_back(h.spec.id);
    }
    return out;
}

void AndOrGraph::enumerate_paths(std::size_t cap) {
    paths_.clear();
    if (nodes_.empty()) return;
    // Every reached OR-node picks exactly one incoming hyper-arc; distinct
    // assignments over reached nodes yield distinct node/arc sets, so no
    // deduplication is needed.
    std::vector<char> in_path(nodes_.size(), 0);
    std::vector<std::uint32_t> cur_nodes, cur_arcs;
    std::function<void(std::vector<std::uint32_t>)> expand =
        [&](std::vector<std::uint32_t> pending) {
            if (pending.empty()) {
                if (paths_.size() >= cap) {
                    throw ModelTooLarge("graph " + id_ + " exceeds the cooperation path cap");
                }
                PathRec rec;
                rec.nodes = cur_nodes;
                rec.arcs = cur_arcs;
                std::sort(rec.nodes.begin(), rec.nodes.end());
                std::sort(rec.arcs.begin(), rec.arcs.end());
                paths_.push_back(std::move(rec));
                return;
            }
            std::uint32_t n = pending.back();
            pending.pop_back();
            const auto& incoming = nodes_[n].arcs_as_parent;
            if (incoming.empty()) {
                expand(std::move(pending));
                return;
            }
            for (std::uint32_t h : incoming) {
                cur_arcs.push_back(h);
                std::vector<std::uint32_t> added;
                auto next = pending;
                for (std::uint32_t c : arcs_[h].children) {
                    if (!in_path[c]) {
                        in_path[c] = 1;
                        added.push_back(c);
                        cur_nodes.push_back(c);
                        next.push_back(c);
                    }
                }
                expand(std::move(next));
                for (std::uint32_t c : added) in_path[c] = 0;
                cur_nodes.resize(cur_nodes.size() - added.size());
                cur_arcs.pop_back();
            }
        };
    in_path[root_] = 1;
    cur_nodes.push_back(root_);
    expand({root_});

    for (std::uint32_t pid = 0; pid < paths_.size(); ++pid) {
        PathRec& p = paths_[pid];
        double cost = 0;
        for (std::uint32_t n : p.nodes) {
            nodes_[n].paths.push_back(pid);
            if (!nodes_[n].met) cost += nodes_[n].spec.weight;
        }
        for (std::uint32_t h : p.arcs) {
            arcs_[h].paths.push_back(pid);
            if (!arcs_[h].solved) cost += arcs_[h].effective_weight;
        }
        p.current_cost = cost;
    }
}

std::vector<CooperationPath> AndOrGraph::cooperation_paths() const {
    std::vector<CooperationPath> out;
    out.reserve(paths_.size());
    for (const PathRec& p : paths_) {
        CooperationPath cp;
        for (std::uint32_t n : p.nodes) cp.nodes.push_back(nodes_[n].spec.id);
        for (std::uint32_t h : p.arcs) cp.hyperarcs.push_back(arcs_[h].spec.id);
        cp.cost = p.current_cost;
        out.push_back(std::move(cp));
    }
    return out;
}

double AndOrGraph::path_cost(std::size_t path_index) const {
    const PathRec& p = paths_.at(path_index);
    double cost = 0;
    for (std::uint32_t n : p.nodes) {
        if (!nodes_[n].met) cost += nodes_[n].spec.weight;
    }
    for (std::uint32_t h : p.arcs) {
        if (!arcs_[h].solved) cost += arcs_[h].effective_weight;
    }
    return cost;
}

double AndOrGraph::path_cost_cached(std::size_t path_index) const {
    return paths_.at(path_index).current_cost;
}

double AndOrGraph::min_path_cost() const {
    double best = std::numeric_limits<double>::infinity();
    for (const PathRec& p : paths_) best = std::min(best, p.current_cost);
    return paths_.empty() ? 0 : best;
}

double AndOrGraph::min_cost_through_node(const std::string& node) const {
    const NodeRec& n = nodes_[node_index(node)];
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t pid : n.paths) best = std::min(best, paths_[pid].current_cost);
    return best;
}

double AndOrGraph::min_cost_through_arc(const std::string& arc) const {
    const ArcRec& h = arcs_[arc_index(arc)];
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t pid : h.paths) best = std::min(best, paths_[pid].current_cost);
    return best;
}

void AndOrGraph::set_node_feasible(std::uint32_t n, bool value) {
    if (value && nodes_[n].locked) return;
    if (nodes_[n].feasible == value) return;
    nodes_[n].feasible = value;
    feasible_node_count_ += value ? 1 : -1;
}

void AndOrGraph::set_arc_feasible(std::uint32_t h, bool value) {
    if (value && arcs_[h].locked) return;
    if (arcs_[h].feasible == value) return;
    arcs_[h].feasible = value;
    feasible_arc_count_ += value ? 1 : -1;
}

void AndOrGraph::subtract_from_paths_node(std::uint32_t n) {
    double w = nodes_[n].spec.weight;
    if (w == 0) return;
    for (std::uint32_t pid : nodes_[n].paths) paths_[pid].current_cost -= w;
}

void AndOrGraph::subtract_from_paths_arc(std::uint32_t h) {
    double w = arcs_[h].effective_weight;
    if (w == 0) return;
    for (std::uint32_t pid : arcs_[h].paths) paths_[pid].current_cost -= w;
}

bool AndOrGraph::mark_node_met(const std::string& node) {
    std::uint32_t n = node_index(node);
    if (!nodes_[n].feasible || nodes_[n].met) return false;
    for (const ProcessFlag& p : nodes_[n].processes) {
        if (p.active) return false;
    }
    nodes_[n].met = true;
    set_node_feasible(n, false);
    subtract_from_paths_node(n);
    return true;
}

bool AndOrGraph::mark_hyperarc_solved(const std::string& arc) {
    std::uint32_t h = arc_index(arc);
    ArcRec& rec = arcs_[h];
    if (!rec.feasible || rec.solved || rec.transitioned) return false;
    int prev = -1;
    for (const ActionInstance& a : rec.actions) {
        if (!a.done || a.done_seq < prev) return false;
        prev = a.done_seq;
    }
    rec.solved = true;
    set_arc_feasible(h, false);
    subtract_from_paths_arc(h);
    return true;
}

void AndOrGraph::solve_arc_via_transition(const std::string& arc) {
    solve_arc_via_transition_idx(arc_index(arc));
}

void AndOrGraph::solve_arc_via_transition_idx(std::uint32_t h) {
    if (arcs_[h].solved) return;
    arcs_[h].solved = true;
    set_arc_feasible(h, false);
    subtract_from_paths_arc(h);
}

// Shared by both update algorithms: an unsolved hyper-arc is feasible iff
// every child is met and no solved hyper-arc shares one of its children.
// Without the sibling check a met event could resurrect an alternative that
// sibling exclusion already ruled out.
bool AndOrGraph::unsolved_arc_feasible(std::uint32_t h) const {
    for (std::uint32_t c : arcs_[h].children) {
        if (!nodes_[c].met) return false;
        for (std::uint32_t sibling : nodes_[c].arcs_as_child) {
            if (sibling != h && arcs_[sibling].solved) return false;
        }
    }
    return true;
}

// Algorithm 1.
void AndOrGraph::update_node_feasibility(std::uint32_t n) {
    set_node_feasible(n, false);
    NodeRec& rec = nodes_[n];
    if (rec.met) {
        for (std::uint32_t h : rec.arcs_as_child) {
            if (arcs_[h].solved) {
                set_arc_feasible(h, false);
            } else {
                set_arc_feasible(h, unsolved_arc_feasible(h));
            }
        }
    } else {
        if (rec.arcs_as_parent.empty()) {
            set_node_feasible(n, true);
        } else {
            for (std::uint32_t h : rec.arcs_as_parent) {
                if (arcs_[h].solved) {
                    set_node_feasible(n, true);
                    break;
                }
            }
        }
    }
}

// Algorithm 2. In the non-solved branch the arc also becomes infeasible when
// a solved hyper-arc shares one of its children.
void AndOrGraph::update_hyperarc_feasibility(std::uint32_t h) {
    set_arc_feasible(h, false);
    ArcRec& rec = arcs_[h];
    if (rec.solved) {
        std::uint32_t parent = rec.parent;
        if (!nodes_[parent].met) set_node_feasible(parent, true);
        for (std::uint32_t c : rec.children) {
            for (std::uint32_t sibling : nodes_[c].arcs_as_child) {
                set_arc_feasible(sibling, false);
            }
        }
    } else {
        set_arc_feasible(h, unsolved_arc_feasible(h));
    }
}

void AndOrGraph::update_node_feasibility(const std::string& node) {
    update_node_feasibility(node_index(node));
}

void AndOrGraph::update_hyperarc_feasibility(const std::string& arc) {
    update_hyperarc_feasibility(arc_index(arc));
}

void AndOrGraph::mark_action_done(const std::string& arc, const std::string& action) {
    ArcRec& rec = arcs_[arc_index(arc)];
    for (ActionInstance& a : rec.actions) {
        if (a.name == action && !a.done) {
            a.done = true;
            a.done_seq = rec.next_done_seq++;
            return;
        }
    }
    throw ModelError("no undone action " + action + " on hyper-arc " + arc);
}

void AndOrGraph::complete_actions(const std::string& arc) {
    ArcRec& rec = arcs_[arc_index(arc)];
    for (ActionInstance& a : rec.actions) {
        if (!a.done) {
            a.done = true;
            a.done_seq = rec.next_done_seq++;
        }
    }
}

void AndOrGraph::deactivate_process(const std::string& node, const std::string& process) {
    NodeRec& rec = nodes_[node_index(node)];
    for (ProcessFlag& p : rec.processes) {
        if (p.name == process) {
            p.active = false;
            return;
        }
    }
    throw ModelError("no process " + process + " on node " + node);
}

bool AndOrGraph::all_processes_inactive(const std::string& node) const {
    const NodeRec& rec = nodes_[node_index(node)];
    return std::none_of(rec.processes.begin(), rec.processes.end(),
                        [](const ProcessFlag& p) { return p.active; });
}

void AndOrGraph::force_unfeasible_node(const std::string& node) {
    std::uint32_t n = node_index(node);
    set_node_feasible(n, false);
    nodes_[n].locked = true;
}

void AndOrGraph::force_unfeasible_arc(const std::string& arc) {
    force_unfeasible_arc_idx(arc_index(arc));
}

void AndOrGraph::force_unfeasible_arc_idx(std::uint32_t h) {
    set_arc_feasible(h, false);
    arcs_[h].locked = true;
}

// Algorithm 3, with the cost taken as the minimum over the containing
// cooperation paths per the optimality rule.
std::vector<Suggestion> AndOrGraph::find_suggestions() const {
    std::vector<Suggestion> out;
    for (const NodeRec& n : nodes_) {
        if (!n.feasible) continue;
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t pid : n.paths) best = std::min(best, paths_[pid].current_cost);
        out.push_back({n.spec.id, false, best});
    }
    for (const ArcRec& h : arcs_) {
        if (!h.feasible) continue;
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t pid : h.paths) best = std::min(best, paths_[pid].current_cost);
        out.push_back({h.spec.id, true, best});
    }
    std::sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.item < b.item;
    });
    return out;
}

// Algorithm 4.
PhaseResult AndOrGraph::online_phase(std::span<const std::string> met_nodes,
                                     std::span<const std::string> solved_arcs) {
    for (const std::string& n : met_nodes) {
        mark_node_met(n);
        update_node_feasibility(n);
    }
    for (const std::string& h : solved_arcs) {
        mark_hyperarc_solved(h);
        update_hyperarc_feasibility(h);
    }
    if (solved()) return {PhaseStatus::Solved, {}};
    if (feasible_count() == 0) return {PhaseStatus::Failed, {}};
    // Path costs are maintained incrementally by the mark operations
    // (update-all-paths folded into the marks), so suggestions are current.
    return {PhaseStatus::Suggestions, find_suggestions()};
}

void AndOrGraph::initial_feasibility() {
    for (std::uint32_t n = 0; n < nodes_.size(); ++n) update_node_feasibility(n);
    for (std::uint32_t h = 0; h < arcs_.size(); ++h) update_hyperarc_feasibility(h);
}

void AndOrGraph::clear_feasibility() {
    for (std::uint32_t n = 0; n < nodes_.size(); ++n) set_node_feasible(n, false);
    for (std::uint32_t h = 0; h < arcs_.size(); ++h) set_arc_feasible(h, false);
}

void AndOrGraph::set_arc_effective_weight(const std::string& arc, double w) {
    set_arc_effective_weight_idx(arc_index(arc), w);
}

void AndOrGraph::set_arc_effective_weight_idx(std::uint32_t h, double w) {
    ArcRec& rec = arcs_[h];
    double delta = w - rec.effective_weight;
    rec.effective_weight = w;
    if (delta == 0 || rec.solved) return;
    for (std::uint32_t pid : rec.paths) paths_[pid].current_cost += delta;
}

double AndOrGraph::arc_effective_weight(const std::string& arc) const {
    return arcs_[arc_index(arc)].effective_weight;
}

}  // namespace coop

#include "coopgraph/task_manager.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace coop {

std::optional<std::size_t> TableRow::first_undone() const {
    for (std::size_t i = 0; i < done.size(); ++i) {
        if (!done[i]) return i;
    }
    return std::nullopt;
}

ActionStateTable ActionStateTable::build(const std::vector<HierSuggestion>& suggestions,
                                         const HierGraph& model, const ActionLibrary& lib) {
    ActionStateTable t;
    for (const HierSuggestion& s : suggestions) {
        TableRow row;
        row.graph = s.graph;
        row.item = s.item;
        row.is_arc = s.is_arc;
        row.cost = s.cost;
        const AndOrGraph& g = model.graph(s.graph);
        if (s.is_arc) {
            for (const ActionInstance& a : g.arc_actions(s.item)) {
                if (!lib.has(a.name)) {
                    throw UnknownAction("hyper-arc " + s.item + " references unknown action " +
                                        a.name);
                }
                row.steps.push_back(a.name);
                row.done.push_back(a.done);
            }
        } else {
            for (const ProcessFlag& p : g.node_processes(s.item)) {
                row.steps.push_back(p.name);
                row.done.push_back(!p.active);
            }
            row.grounded = true;  // node rows carry no variables
        }
        t.rows_.push_back(std::move(row));
    }
    std::sort(t.rows_.begin(), t.rows_.end(), [](const TableRow& a, const TableRow& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.item != b.item) return a.item < b.item;
        return a.graph < b.graph;
    });
    return t;
}

std::optional<std::size_t> ActionStateTable::select_optimal() const {
    if (rows_.empty()) return std::nullopt;
    return 0;  // rows are kept sorted by (cost, item, graph)
}

std::optional<std::size_t> ActionStateTable::find(const std::string& graph,
                                                  const std::string& item) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].graph == graph && rows_[i].item == item) return i;
    }
    return std::nullopt;
}

namespace {

/// Candidate constants for one variable: the intersection over the
/// precondition patterns of the first action mentioning it, each matched
/// against the current facts with other variables left free.
std::vector<std::string> variable_candidates(const std::string& var,
                                             const std::vector<const ActionSpec*>& specs,
                                             const WorldState& world) {
    for (const ActionSpec* spec : specs) {
        if (std::find(spec->params.begin(), spec->params.end(), var) == spec->params.end()) {
            continue;
        }
        std::set<std::string> result;
        bool first_pattern = true;
        for (const Literal& pattern : spec->pre.literals()) {
            bool mentions = false;
            for (const Term& t : pattern.args) {
                if (t.is_variable() && t.name == var) mentions = true;
            }
            if (!mentions) continue;
            std::set<std::string> here;
            for (const Substitution& sigma : query_groundings(pattern, world)) {
                if (auto c = sigma.lookup(var)) here.insert(*c);
            }
            if (first_pattern) {
                result = std::move(here);
                first_pattern = false;
            } else {
                std::set<std::string> merged;
                std::set_intersection(result.begin(), result.end(), here.begin(), here.end(),
                                      std::inserter(merged, merged.begin()));
                result = std::move(merged);
            }
        }
        if (!first_pattern) return {result.begin(), result.end()};
        // the first action mentioning the variable has no precondition
        // pattern for it; fall through to later actions
    }
    return {};
}

}  // namespace

std::vector<DecisionBranch> generate_decision_tree(const TableRow& row, const ActionLibrary& lib,
                                                   const WorldState& world,
                                                   const AgentRoster& roster,
                                                   const Substitution& pinned) {
    std::vector<const ActionSpec*> specs;
    specs.reserve(row.steps.size());
    for (const std::string& name : row.steps) specs.push_back(&lib.get(name));

    // Variables in first-occurrence order; the same name co-refers across
    // the actions of one hyper-arc.
    std::vector<std::string> variables;
    for (const ActionSpec* spec : specs) {
        for (const std::string& p : spec->params) {
            if (std::find(variables.begin(), variables.end(), p) == variables.end()) {
                variables.push_back(p);
            }
        }
    }
    std::vector<std::vector<std::string>> candidates;
    for (const std::string& v : variables) {
        if (auto c = pinned.lookup(v)) {
            candidates.push_back({*c});
            continue;
        }
        auto cands = variable_candidates(v, specs, world);
        if (cands.empty()) {
            throw NoGrounding("variable ?" + v + " of row " + row.item + " has no candidates");
        }
        candidates.push_back(std::move(cands));
    }

    // Distinct `any` choice sets, each enumerated once per row; agents of a
    // joint or only spec are fixed.
    std::vector<std::vector<std::string>> choice_sets;
    std::vector<int> choice_of_action(specs.size(), -1);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (specs[i]->agents.mode != AgentSpec::Mode::Any) continue;
        const auto& set = specs[i]->agents.agents;
        auto it = std::find(choice_sets.begin(), choice_sets.end(), set);
        if (it == choice_sets.end()) {
            choice_of_action[i] = static_cast<int>(choice_sets.size());
            choice_sets.push_back(set);
        } else {
            choice_of_action[i] = static_cast<int>(it - choice_sets.begin());
        }
    }
    for (const auto& set : choice_sets) {
        for (const std::string& a : set) {
            if (!roster.has(a)) throw UnknownAgent("unknown agent " + a);
        }
    }

    std::vector<DecisionBranch> branches;
    std::vector<std::size_t> var_pick(variables.size(), 0);
    std::vector<std::size_t> choice_pick(choice_sets.size(), 0);
    auto emit = [&]() {
        DecisionBranch b;
        for (std::size_t i = 0; i < variables.size(); ++i) {
            b.grounding.bind(variables[i], candidates[i][var_pick[i]]);
        }
        for (std::size_t i = 0; i < specs.size(); ++i) {
            switch (specs[i]->agents.mode) {
                case AgentSpec::Mode::Only:
                case AgentSpec::Mode::Joint:
                    b.assignees.push_back(specs[i]->agents.agents);
                    break;
                case AgentSpec::Mode::Any:
                    b.assignees.push_back(
                        {choice_sets[choice_of_action[i]][choice_pick[choice_of_action[i]]]});
                    break;
            }
        }
        branches.push_back(std::move(b));
    };
    // object groundings vary first, agent choices after
    std::function<void(std::size_t)> walk_choices = [&](std::size_t ci) {
        if (ci == choice_sets.size()) {
            emit();
            return;
        }
        for (choice_pick[ci] = 0; choice_pick[ci] < choice_sets[ci].size(); ++choice_pick[ci]) {
            walk_choices(ci + 1);
        }
    };
    std::function<void(std::size_t)> walk_vars = [&](std::size_t vi) {
        if (vi == variables.size()) {
            walk_choices(0);
            return;
        }
        for (var_pick[vi] = 0; var_pick[vi] < candidates[vi].size(); ++var_pick[vi]) {
            walk_vars(vi + 1);
        }
    };
    walk_vars(0);
    return branches;
}

GroundedAction ground_row_action(const TableRow& row, std::size_t step, const ActionLibrary& lib) {
    const ActionSpec& spec = lib.get(row.steps.at(step));
    GroundedAction out;
    out.name = spec.name;
    for (const std::string& p : spec.params) {
        auto c = row.grounding.lookup(p);
        if (!c) throw NotGrounded("parameter ?" + p + " of " + spec.name + " is unbound");
        out.args.push_back(*c);
    }
    out.preconditions = apply_substitution(spec.pre, row.grounding);
    return out;
}

namespace {

GroundedAction ground_with(const ActionSpec& spec, const Substitution& sigma) {
    GroundedAction out;
    out.name = spec.name;
    for (const std::string& p : spec.params) {
        auto c = sigma.lookup(p);
        if (!c) throw NotGrounded("parameter ?" + p + " of " + spec.name + " is unbound");
        out.args.push_back(*c);
    }
    out.preconditions = apply_substitution(spec.pre, sigma);
    return out;
}

}  // namespace

void evaluate_decision_tree(std::vector<DecisionBranch>& branches, const TableRow& row,
                            const ActionLibrary& lib, const WorldState& world,
                            const AgentRoster& roster) {
    for (DecisionBranch& b : branches) {
        WorldState snapshot = world;  // branch simulations never touch the live world
        b.outcomes.clear();
        b.total_seconds = 0;
        b.utility = 0;
        bool all_ok = true;
        for (std::size_t i = 0; i < row.steps.size(); ++i) {
            const ActionSpec& spec = lib.get(row.steps[i]);
            GroundedAction ga = ground_with(spec, b.grounding);
            SimulationOutcome outcome = simulate_action(ga, b.assignees[i], snapshot, roster);
            b.outcomes.push_back(outcome);
            if (!outcome.success) {
                all_ok = false;
                break;
            }
            b.total_seconds += outcome.seconds;
            snapshot = apply_effects(ga.preconditions,
                                     apply_substitution(spec.eff_add, b.grounding),
                                     apply_substitution(spec.eff_del, b.grounding), snapshot);
        }
        if (all_ok && b.total_seconds > 0) {
            b.utility = 1.0 / b.total_seconds;
        }
    }
}

OptimalStateUpdate update_optimal_state(TableRow& row,
                                        const std::vector<DecisionBranch>& branches) {
    std::size_t best = 0;
    double best_utility = 0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        if (branches[i].utility > best_utility) {
            best_utility = branches[i].utility;
            best = i;
        }
    }
    if (best_utility <= 0) return {false, 0};
    row.grounded = true;
    row.grounding = branches[best].grounding;
    row.assignees = branches[best].assignees;
    return {true, best};
}

std::optional<NextAction> find_next_action(const TableRow& row) {
    if (row.is_arc && !row.grounded) {
        throw NotGrounded("row " + row.item + " is not grounded");
    }
    auto step = row.first_undone();
    if (!step) return std::nullopt;
    NextAction next;
    next.step = *step;
    next.action = row.steps[*step];
    if (*step < row.assignees.size()) next.agents = row.assignees[*step];
    return next;
}

std::string to_string(Directive::Kind k) {
    switch (k) {
        case Directive::Kind::ActionDone: return "action-done";
        case Directive::Kind::RowCompleted: return "row-completed";
        case Directive::Kind::TerminateRobot: return "terminate-robot";
        case Directive::Kind::GoToRest: return "goto-rest";
        case Directive::Kind::RowSwitched: return "row-switched";
        case Directive::Kind::RowInfeasible: return "row-infeasible";
        case Directive::Kind::StaleEvent: return "stale-event";
        case Directive::Kind::ProcessStopped: return "process-stopped";
    }
    return "unknown";
}

CooperationEngine::CooperationEngine(HierGraph& model, ActionLibrary lib, WorldState world,
                                     AgentRoster roster)
    : model_(model), lib_(std::move(lib)), world_(std::move(world)), roster_(std::move(roster)) {}

PhaseStatus CooperationEngine::query() {
    HierEvents events = std::move(staged_);
    staged_ = HierEvents{};
    HierPhaseResult result = model_.online_hierarchical_phase(events);
    active_row_.reset();
    dispatched_step_.reset();
    if (result.status == PhaseStatus::Suggestions) {
        table_ = ActionStateTable::build(result.suggestions, model_, lib_);
    } else {
        table_ = ActionStateTable{};
    }
    if (committed_) {
        auto idx = table_.find(committed_->graph, committed_->item);
        if (idx) {
            TableRow& row = table_.rows()[*idx];
            row.grounded = true;
            row.grounding = committed_->grounding;
            row.assignees = committed_->assignees;
            active_row_ = *idx;
        } else {
            committed_.reset();
        }
    }
    return result.status;
}

void CooperationEngine::commit(std::size_t row_index) {
    const TableRow& row = table_.rows()[row_index];
    committed_ = Committed{row.graph, row.item, row.grounding, row.assignees};
    active_row_ = row_index;
}

std::vector<std::pair<std::string, std::string>> CooperationEngine::stage_met_states() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const TableRow& row : table_.rows()) {
        if (row.is_arc) continue;
        if (model_.graph(row.graph).all_processes_inactive(row.item)) {
            staged_.met_nodes[row.graph].push_back(row.item);
            out.emplace_back(row.graph, row.item);
        }
    }
    return out;
}

CooperationEngine::Selection CooperationEngine::select_and_ground() {
    std::optional<std::size_t> pick = active_row_;  // committed row first
    if (!pick) pick = table_.select_optimal();
    if (!pick) return {SelectOutcome::NoRows, 0};
    TableRow& row = table_.rows()[*pick];
    if (!row.is_arc) {
        active_row_ = *pick;
        return {SelectOutcome::Waiting, *pick};
    }
    if (!row.grounded) {
        std::vector<DecisionBranch> branches;
        try {
            branches = generate_decision_tree(row, lib_, world_, roster_);
        } catch (const NoGrounding&) {
            std::vector<Directive> sink;
            mark_row_infeasible(*pick, sink);
            return {SelectOutcome::RowInfeasible, *pick};
        }
        evaluate_decision_tree(branches, row, lib_, world_, roster_);
        OptimalStateUpdate update = update_optimal_state(row, branches);
        if (!update.grounded) {
            std::vector<Directive> sink;
            mark_row_infeasible(*pick, sink);
            return {SelectOutcome::RowInfeasible, *pick};
        }
    }
    commit(*pick);
    return {SelectOutcome::Grounded, *pick};
}

std::optional<NextAction> CooperationEngine::dispatch_next() {
    if (!active_row_) return std::nullopt;
    auto next = find_next_action(table_.rows()[*active_row_]);
    if (next) dispatched_step_ = next->step;
    return next;
}

bool CooperationEngine::robot_dispatch_active() const {
    if (!active_row_ || !dispatched_step_) return false;
    const TableRow& row = table_.rows()[*active_row_];
    if (*dispatched_step_ >= row.assignees.size()) return false;
    for (const std::string& a : row.assignees[*dispatched_step_]) {
        if (!roster_.get(a).is_human) return true;
    }
    return false;
}

void CooperationEngine::complete_step(std::size_t row_index, std::size_t step,
                                      std::vector<Directive>& out) {
    TableRow& row = table_.rows()[row_index];
    row.done[step] = true;
    model_.graph(row.graph).mark_action_done(row.item, row.steps[step]);
    // The event says the action happened; the world absorbs its effects even
    // if the stored facts had drifted.
    const ActionSpec& spec = lib_.get(row.steps[step]);
    const State del = apply_substitution(spec.eff_del, row.grounding);
    const State add = apply_substitution(spec.eff_add, row.grounding);
    for (const Literal& l : del.literals()) world_.remove_fact(l);
    for (const Literal& l : add.literals()) world_.add_fact(l);
    out.push_back({Directive::Kind::ActionDone, row.steps[step]});
    if (!row.first_undone()) {
        staged_.solved_arcs[row.graph].push_back(row.item);
        out.push_back({Directive::Kind::RowCompleted, row.graph + ":" + row.item});
        if (active_row_ && *active_row_ == row_index) {
            active_row_.reset();
            dispatched_step_.reset();
            committed_.reset();
        }
    }
}

void CooperationEngine::mark_row_infeasible(std::size_t row_index, std::vector<Directive>& out) {
    TableRow& row = table_.rows()[row_index];
    model_.force_unfeasible(row.graph, row.item, row.is_arc);
    out.push_back({Directive::Kind::RowInfeasible, row.graph + ":" + row.item});
    if (active_row_ && *active_row_ == row_index) {
        active_row_.reset();
        dispatched_step_.reset();
        committed_.reset();
    }
}

bool CooperationEngine::try_switch_to_row(std::size_t row_index, const Event& ev,
                                          std::vector<Directive>& out) {
    TableRow& row = table_.rows()[row_index];
    if (!row.grounded) {
        std::vector<DecisionBranch> branches;
        try {
            branches = generate_decision_tree(row, lib_, world_, roster_, ev.grounding);
        } catch (const NoGrounding&) {
            return false;
        }
        evaluate_decision_tree(branches, row, lib_, world_, roster_);
        OptimalStateUpdate update = update_optimal_state(row, branches);
        if (!update.grounded) return false;
    }
    if (robot_dispatch_active()) {
        out.push_back({Directive::Kind::TerminateRobot, ""});
        out.push_back({Directive::Kind::GoToRest, ""});
    }
    dispatched_step_.reset();
    commit(row_index);
    out.push_back({Directive::Kind::RowSwitched, row.graph + ":" + row.item});
    auto step = row.first_undone();
    if (step) complete_step(row_index, *step, out);
    return true;
}

std::vector<Directive> CooperationEngine::handle_event(const Event& ev) {
    std::vector<Directive> out;
    switch (ev.kind) {
        case Event::Kind::RobotAck: {
            if (!active_row_ || !dispatched_step_) {
                out.push_back({Directive::Kind::StaleEvent, "ack without dispatch"});
                return out;
            }
            if (ev.ok) {
                complete_step(*active_row_, *dispatched_step_, out);
                dispatched_step_.reset();
            } else {
                mark_row_infeasible(*active_row_, out);
            }
            return out;
        }
        case Event::Kind::HumanAction: {
            // The active row's next expected action first.
            if (active_row_) {
                TableRow& row = table_.rows()[*active_row_];
                auto step = row.first_undone();
                if (step && row.steps[*step] == ev.action &&
                    row.grounding.consistent_with(ev.grounding)) {
                    complete_step(*active_row_, *step, out);
                    dispatched_step_.reset();
                    return out;
                }
            }
            // Otherwise another feasible row whose next action matches; the
            // human decision overrides the current dispatch.
            for (std::size_t i = 0; i < table_.rows().size(); ++i) {
                if (active_row_ && *active_row_ == i) continue;
                TableRow& row = table_.rows()[i];
                if (!row.is_arc) continue;
                auto step = row.first_undone();
                if (!step || row.steps[*step] != ev.action) continue;
                if (row.grounded && !row.grounding.consistent_with(ev.grounding)) continue;
                if (try_switch_to_row(i, ev, out)) return out;
            }
            out.push_back({Directive::Kind::StaleEvent, "human action " + ev.action});
            return out;
        }
        case Event::Kind::ProcessDeactivated: {
            for (int idx : model_.layer_order()) {
                const auto& inst = model_.instance(idx);
                for (const std::string& node : inst.graph->node_ids()) {
                    for (const ProcessFlag& p : inst.graph->node_processes(node)) {
                        if (p.name == ev.process && p.active) {
                            inst.graph->deactivate_process(node, ev.process);
                            out.push_back({Directive::Kind::ProcessStopped, ev.process});
                            return out;
                        }
                    }
                }
            }
            out.push_back({Directive::Kind::StaleEvent, "process " + ev.process});
            return out;
        }
    }
    return out;
}

}  // namespace coop

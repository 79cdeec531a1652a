#include "coopgraph/world.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace coop {

void WorldState::add_object(const std::string& name, const std::string& type,
                            std::optional<std::array<double, 3>> pose) {
    objects_[name] = {type, pose};
    // An object declaration also asserts its type fact.
    Literal fact;
    fact.predicate = type;
    fact.args.push_back(Term::constant(name));
    add_fact(fact);
}

void WorldState::add_fact(const Literal& fact) {
    if (!is_grounded(fact)) {
        throw ModelError("world facts must be grounded: " + to_string(fact));
    }
    if (fact.negated) {
        Literal positive = fact;
        positive.negated = false;
        facts_.erase(positive);
        return;
    }
    facts_.insert(fact);
}

void WorldState::remove_fact(const Literal& fact) { facts_.erase(fact); }

bool WorldState::holds(const Literal& l) const {
    if (l.negated) {
        Literal positive = l;
        positive.negated = false;
        return !facts_.contains(positive);
    }
    return facts_.contains(l);
}

bool WorldState::holds(const State& s) const {
    return std::all_of(s.literals().begin(), s.literals().end(),
                       [&](const Literal& l) { return holds(l); });
}

std::optional<double> WorldState::distance(const std::string& a, const std::string& b) const {
    auto ia = objects_.find(a);
    auto ib = objects_.find(b);
    if (ia == objects_.end() || ib == objects_.end()) return std::nullopt;
    if (!ia->second.pose || !ib->second.pose) return std::nullopt;
    const auto& pa = *ia->second.pose;
    const auto& pb = *ib->second.pose;
    double dx = pa[0] - pb[0], dy = pa[1] - pb[1], dz = pa[2] - pb[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<Substitution> query_groundings(const Literal& pattern, const WorldState& w) {
    std::vector<Substitution> out;
    for (const Literal& fact : w.facts().literals()) {
        if (auto sigma = unify(pattern, fact)) out.push_back(std::move(*sigma));
    }
    std::sort(out.begin(), out.end(), [](const Substitution& a, const Substitution& b) {
        return a.bindings() < b.bindings();
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ConsistencyResult check_consistency(const std::vector<Literal>& percept, WorldState& w) {
    ConsistencyResult result;
    for (const Literal& l : percept) {
        if (l.negated) {
            Literal positive = l;
            positive.negated = false;
            if (w.facts().contains(positive)) result.conflicts.push_back(positive);
        }
    }
    if (!result.conflicts.empty()) {
        result.consistent = false;
        return result;
    }
    for (const Literal& l : percept) {
        if (!l.negated) w.add_fact(l);
    }
    return result;
}

void AgentRoster::add(AgentModel m) {
    std::string id = m.id;
    models_[id] = std::move(m);
}

const AgentModel& AgentRoster::get(const std::string& id) const {
    auto it = models_.find(id);
    if (it == models_.end()) throw UnknownAgent("unknown agent " + id);
    return it->second;
}

bool AgentRoster::has(const std::string& id) const { return models_.count(id) > 0; }

std::vector<std::string> AgentRoster::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, m] : models_) out.push_back(id);
    return out;
}

double round_to_milliseconds(double seconds) {
    return std::round(seconds * 1000.0) / 1000.0;
}

namespace {

bool failure_matches(const FailurePattern& p, const GroundedAction& a) {
    if (p.action != a.name) return false;
    if (p.args.empty()) return true;
    if (p.args.size() != a.args.size()) return false;
    for (std::size_t i = 0; i < p.args.size(); ++i) {
        if (p.args[i].is_variable()) continue;  // wildcard
        if (p.args[i].name != a.args[i]) return false;
    }
    return true;
}

std::optional<double> agent_duration(const AgentModel& m, const GroundedAction& a,
                                     const WorldState& w) {
    auto it = m.durations.find(a.name);
    if (it == m.durations.end()) return std::nullopt;
    double seconds = it->second.base_seconds;
    if (it->second.seconds_per_metre != 0) {
        // distance between the first two pose-carrying arguments
        std::vector<std::string> posed;
        for (const std::string& arg : a.args) {
            auto obj = w.objects().find(arg);
            if (obj != w.objects().end() && obj->second.pose) posed.push_back(arg);
            if (posed.size() == 2) break;
        }
        if (posed.size() == 2) {
            seconds += it->second.seconds_per_metre * *w.distance(posed[0], posed[1]);
        }
    }
    return round_to_milliseconds(seconds);
}

}  // namespace

SimulationOutcome simulate_action(const GroundedAction& action,
                                  const std::vector<std::string>& agents,
                                  const WorldState& w, const AgentRoster& roster) {
    if (agents.empty()) throw UnknownAgent("action " + action.name + " has no agent");
    if (!w.holds(action.preconditions)) return {false, 0};
    double total = 0;
    for (const std::string& id : agents) {
        const AgentModel& m = roster.get(id);
        for (const FailurePattern& p : m.failures) {
            if (failure_matches(p, action)) return {false, 0};
        }
        auto d = agent_duration(m, action, w);
        if (!d || *d > m.timeout_seconds) return {false, 0};
        total = std::max(total, *d);  // joint actions end with the slowest agent
    }
    return {true, round_to_milliseconds(total)};
}

WorldState apply_effects(const State& pre, const State& eff_add, const State& eff_del,
                         const WorldState& w) {
    if (!w.holds(pre)) {
        throw PreconditionViolation("preconditions do not hold: " + to_string(pre));
    }
    WorldState out = w;
    for (const Literal& l : eff_del.literals()) out.remove_fact(l);
    for (const Literal& l : eff_add.literals()) out.add_fact(l);
    return out;
}

}  // namespace coop

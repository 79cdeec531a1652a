#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coopgraph/fol.hpp"

namespace coop {

class UnknownAgent : public ModelError {
public:
    using ModelError::ModelError;
};
class PreconditionViolation : public ModelError {
public:
    using ModelError::ModelError;
};

struct ObjectInfo {
    std::string type;
    std::optional<std::array<double, 3>> pose;  // metres
};

/// Closed-world knowledge base: facts absent from the set are false, no
/// variable occurs in any fact. Cheap value type; simulations run on copies.
class WorldState {
public:
    WorldState() = default;

    void add_object(const std::string& name, const std::string& type,
                    std::optional<std::array<double, 3>> pose = std::nullopt);
    void add_fact(const Literal& fact);
    void remove_fact(const Literal& fact);
    bool holds(const Literal& l) const;  // closed world; handles negation
    bool holds(const State& s) const;
    const std::map<std::string, ObjectInfo>& objects() const { return objects_; }
    const State& facts() const { return facts_; }
    std::optional<double> distance(const std::string& a, const std::string& b) const;

private:
    State facts_;  // positive grounded literals only
    std::map<std::string, ObjectInfo> objects_;
};

/// All substitutions grounding `pattern` against the facts, in lexicographic
/// order of the bound constants.
std::vector<Substitution> query_groundings(const Literal& pattern, const WorldState& w);

struct ConsistencyResult {
    bool consistent = true;
    std::vector<Literal> conflicts;  // stored facts contradicted by the percept
};

/// Compares a percept against the world. Contradictions (a negated percept
/// literal whose atom is currently a fact) leave the world untouched;
/// otherwise new positive facts are absorbed.
ConsistencyResult check_consistency(const std::vector<Literal>& percept, WorldState& w);

struct DurationModel {
    double base_seconds = 0;
    double seconds_per_metre = 0;  // applied to the distance between the
                                   // first two pose-carrying arguments
};

struct FailurePattern {
    std::string action;
    std::vector<Term> args;  // variables act as wildcards; empty matches all
};

/// Deterministic surrogate for one agent's execution behaviour.
struct AgentModel {
    std::string id;
    bool is_human = false;
    double timeout_seconds = 30.0;  // per-action simulated bound
    std::map<std::string, DurationModel> durations;
    std::vector<FailurePattern> failures;
};

struct SimulationOutcome {
    bool success = false;
    double seconds = 0;  // rounded to milliseconds
};

/// Grounded action as fed to the simulator: resolved name and arguments plus
/// the (grounded) precondition to check against the world snapshot.
struct GroundedAction {
    std::string name;
    std::vector<std::string> args;  // constants, in param order
    State preconditions;
};

class AgentRoster {
public:
    void add(AgentModel m);
    const AgentModel& get(const std::string& id) const;  // throws UnknownAgent
    bool has(const std::string& id) const;
    std::vector<std::string> ids() const;

private:
    std::map<std::string, AgentModel> models_;
};

/// Simulates one grounded action performed by one or more agents on a world
/// snapshot. Fails when the preconditions do not hold, when a declared
/// failure pattern matches, or when the duration exceeds the agent timeout.
/// Joint executions take the slowest participant's time. Fully deterministic.
SimulationOutcome simulate_action(const GroundedAction& action,
                                  const std::vector<std::string>& agents,
                                  const WorldState& w, const AgentRoster& roster);

/// facts' = (facts \ eff-) + eff+; throws PreconditionViolation when pre(a)
/// does not hold. Everything not mentioned by the effects is preserved.
WorldState apply_effects(const State& pre, const State& eff_add, const State& eff_del,
                         const WorldState& w);

double round_to_milliseconds(double seconds);

}  // namespace coop

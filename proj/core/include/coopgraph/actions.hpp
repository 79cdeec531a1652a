#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coopgraph/fol.hpp"

namespace coop {

class UnknownAction : public ModelError {
public:
    using ModelError::ModelError;
};

/// Who may perform an action: one fixed agent (`only`), a choice among
/// several (`any`), or all of them together (`joint`).
struct AgentSpec {
    enum class Mode { Only, Any, Joint };
    Mode mode = Mode::Only;
    std::vector<std::string> agents;

    friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

/// PDDL-style action template: parameters, preconditions, add and delete
/// effects, plus the permitted agents.
struct ActionSpec {
    std::string name;
    std::vector<std::string> params;  // variable names without '?'
    State pre;
    State eff_add;
    State eff_del;
    AgentSpec agents;
};

class ActionLibrary {
public:
    /// Throws when add/delete effects overlap or a pre/effect variable is
    /// not declared among the parameters.
    void add(ActionSpec spec);
    const ActionSpec& get(const std::string& name) const;  // throws UnknownAction
    bool has(const std::string& name) const;
    std::vector<std::string> names() const;
    std::size_t size() const { return specs_.size(); }

private:
    std::map<std::string, ActionSpec> specs_;
};

}  // namespace coop

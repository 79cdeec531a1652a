#include "coopgraph/actions.hpp"

#include <set>

namespace coop {

namespace {

void collect_variables(const State& s, std::set<std::string>& out) {
    for (const Literal& l : s.literals()) {
        for (const Term& t : l.args) {
            if (t.is_variable()) out.insert(t.name);
        }
    }
}

}  // namespace

void ActionLibrary::add(ActionSpec spec) {
    for (const Literal& l : spec.eff_add.literals()) {
        if (spec.eff_del.contains(l)) {
            throw ModelError("action " + spec.name + " adds and deletes " + to_string(l));
        }
    }
    std::set<std::string> declared(spec.params.begin(), spec.params.end());
    std::set<std::string> used;
    collect_variables(spec.pre, used);
    collect_variables(spec.eff_add, used);
    collect_variables(spec.eff_del, used);
    for (const std::string& v : used) {
        if (!declared.count(v)) {
            throw ModelError("action " + spec.name + " uses undeclared parameter ?" + v);
        }
    }
    if (spec.agents.agents.empty()) {
        throw ModelError("action " + spec.name + " has no permitted agents");
    }
    std::string name = spec.name;
    if (!specs_.emplace(name, std::move(spec)).second) {
        throw ModelError("duplicate action " + name);
    }
}

const ActionSpec& ActionLibrary::get(const std::string& name) const {
    auto it = specs_.find(name);
    if (it == specs_.end()) throw UnknownAction("unknown action " + name);
    return it->second;
}

bool ActionLibrary::has(const std::string& name) const { return specs_.count(name) > 0; }

std::vector<std::string> ActionLibrary::names() const {
    std::vector<std::string> out;
    for (const auto& [name, spec] : specs_) out.push_back(name);
    return out;
}

}  // namespace coop

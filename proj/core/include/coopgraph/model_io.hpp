#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "coopgraph/actions.hpp"
#include "coopgraph/hierarchy.hpp"
#include "coopgraph/task_manager.hpp"
#include "coopgraph/world.hpp"

namespace coop {

/// Predicate arity bookkeeping: arity is fixed per predicate name within one
/// model; the first occurrence pins it and later mismatches are load errors.
class ArityTable {
public:
    void check(const Literal& l, const std::string& where);

private:
    struct Entry {
        std::size_t arity;
        std::string where;
    };
    std::map<std::string, Entry> entries_;
};

/// Parses graph description files (GRAPH/NODE/ARC lines plus the
/// TRANSITION/MAPLEAF/MAPROOT hierarchy extensions), appending to `out`.
/// Errors are reported as ModelError with file:line positions.
void parse_model_file(std::istream& in, const std::string& filename, HierSpec& out,
                      ArityTable* arity = nullptr);

ActionLibrary parse_action_library(std::istream& in, const std::string& filename,
                                   ArityTable* arity = nullptr);
WorldState parse_world(std::istream& in, const std::string& filename,
                       ArityTable* arity = nullptr);
AgentRoster parse_agents(std::istream& in, const std::string& filename);
std::vector<Event> parse_trace(std::istream& in, const std::string& filename);

/// Canonical renderings; parsing the output reproduces the structure.
std::string serialize_graph(const GraphSpec& g, const std::vector<TransitionSpec>& transitions);
std::string serialize_actions(const ActionLibrary& lib);
std::string serialize_world(const WorldState& w);
std::string serialize_agents(const AgentRoster& roster);
std::string serialize_trace(const std::vector<Event>& trace);

/// Deterministic, locale-independent number rendering (shortest round-trip).
std::string format_double(double v);

}  // namespace coop

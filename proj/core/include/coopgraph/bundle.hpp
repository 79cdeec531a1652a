#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "coopgraph/model_io.hpp"

namespace coop {

/// Everything one cooperation scenario needs: the graph model (one or more
/// layers), and optionally the action library, world, agent models and a
/// replay trace. Graph-only bundles are valid for validation and the
/// benchmark harness; `run` needs actions, world and agents.
struct ScenarioBundle {
    std::string name;
    HierSpec model;
    std::optional<ActionLibrary> actions;
    std::optional<WorldState> world;
    std::optional<AgentRoster> agents;
    std::optional<std::vector<Event>> trace;

    bool runnable() const { return actions && world && agents; }
};

/// Loads a bundle directory: every *.graph file, plus actions.txt,
/// world.txt, agents.txt and trace.txt when present. Files are read in
/// sorted name order. Throws ModelError with file:line positions; the
/// cross-reference checks (action names on ARC lines, agent coverage,
/// process name uniqueness, predicate arity) run after parsing.
ScenarioBundle load_bundle(const std::filesystem::path& dir);

/// Same, from in-memory files (used by the generators and tests). Keys are
/// file names; *.graph files are model files.
ScenarioBundle load_bundle_files(const std::map<std::string, std::string>& files,
                                 const std::string& name);

/// Structural violations of every graph in the bundle, prefixed with the
/// graph id. Empty means every layer is a valid AND/OR graph.
std::vector<Violation> validate_bundle(const ScenarioBundle& bundle);

/// Builds the runtime model: a single graph becomes a degenerate hierarchy,
/// otherwise the full offline hierarchical phase runs (lower layers first,
/// mapping validation, optimistic weights).
HierGraph build_model(const ScenarioBundle& bundle,
                      std::size_t path_cap = AndOrGraph::kDefaultPathCap);

/// Writes bundle files into a directory (used by the generators' CLI verbs).
void write_bundle(const ScenarioBundle& bundle, const std::filesystem::path& dir);

/// Renders the bundle as in-memory files, one graph per *.graph file.
std::map<std::string, std::string> render_bundle(const ScenarioBundle& bundle);

}  // namespace coop

#pragma once

#include <string>

#include "coopgraph/bundle.hpp"

namespace coop {

enum class TableEncoding { Standard, Fol, Hierarchical };

TableEncoding parse_encoding(const std::string& name);  // "standard" | "fol" | "hierarchical"
std::string to_string(TableEncoding e);

/// Table-assembly model for `legs` legs (1..9): a tabletop placement stage,
/// one leg-connection stage per leg (direct by robot or human, or via a
/// middle pose), and a final inspection.
///
///   standard     every leg is a distinct constant and every placement order
///                is enumerated explicitly; capped at 5 legs, beyond which
///                the encoding is not practical.
///   fol          one stage per leg slot, legs grounded online via Leg(?y).
///   hierarchical two layers: a sequential upper graph whose per-leg
///                hyper-arcs expand into one shared leg-connection subgraph.
///
/// Bundles are complete (actions, world, agents) and runnable.
ScenarioBundle generate_table_model(int legs, TableEncoding encoding);

/// Designed model sizes (nodes, arcs) summed over the graph descriptions.
std::pair<std::size_t, std::size_t> designed_size(const ScenarioBundle& bundle);

/// Synthetic kitchen assembly: a five-layer hierarchy of 32 distinct graph
/// descriptions (508 nodes, 215 hyper-arcs designed) whose shared lower
/// graphs instantiate online to 1068 nodes and 483 hyper-arcs.
ScenarioBundle generate_kitchen_model();

/// The single-leg connection fixture: blue/red/black/green cooperation paths
/// with costs 1, 2, 2 and 3.
ScenarioBundle leg1_fixture();

/// The grounding/assignment walkthrough fixture: three feasible hyper-arcs
/// with costs 5, 7 and 6; the robot-direct one grounds over one tabletop,
/// two legs and two robots (four branches) with a best branch of 0.4 s.
ScenarioBundle decision_fixture();

}  // namespace coop

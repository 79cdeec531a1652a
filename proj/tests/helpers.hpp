#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coopgraph/bench.hpp"
#include "coopgraph/generators.hpp"

namespace coop::testing {

/// Random valid AND/OR graph: <= 12 nodes, <= 8 hyper-arcs, integer weights
/// 0..9, acyclic, single root. Nodes are created in topological order with
/// the root last; a repair pass attaches uncovered nodes so the root stays
/// unique.
inline GraphSpec random_graph_spec(SplitMix64& rng) {
    const int n = 1 + static_cast<int>(rng.below(12));
    GraphSpec g;
    g.id = "rnd";
    for (int i = 0; i < n; ++i) {
        NodeSpec node;
        node.id = "n" + std::to_string(i);
        node.weight = static_cast<double>(rng.below(10));
        node.state = State({parse_literal("St_" + std::to_string(i))});
        g.nodes.push_back(std::move(node));
    }
    if (n == 1) return g;
    const int m = 1 + static_cast<int>(rng.below(8));
    for (int a = 0; a < m; ++a) {
        ArcSpec arc;
        arc.id = "h" + std::to_string(a);
        arc.weight = static_cast<double>(rng.below(10));
        // the first arc always feeds the root so the repair pass can attach
        // any node to something higher
        int parent = a == 0 ? n - 1 : 1 + static_cast<int>(rng.below(n - 1));
        arc.parent = "n" + std::to_string(parent);
        std::set<int> children;
        int want = 1 + static_cast<int>(rng.below(3));
        for (int c = 0; c < want; ++c) children.insert(static_cast<int>(rng.below(parent)));
        for (int c : children) arc.children.push_back("n" + std::to_string(c));
        arc.actions.push_back("act_" + arc.id);
        g.arcs.push_back(std::move(arc));
    }
    std::set<std::string> covered;
    for (const ArcSpec& arc : g.arcs) covered.insert(arc.children.begin(), arc.children.end());
    for (int i = 0; i < n - 1; ++i) {
        std::string id = "n" + std::to_string(i);
        if (covered.count(id)) continue;
        std::vector<std::size_t> hosts;
        for (std::size_t a = 0; a < g.arcs.size(); ++a) {
            int parent = std::stoi(g.arcs[a].parent.substr(1));
            if (parent > i) hosts.push_back(a);
        }
        ArcSpec& host = g.arcs[hosts[rng.below(hosts.size())]];
        host.children.push_back(id);
        covered.insert(id);
    }
    return g;
}

struct OraclePath {
    std::set<std::string> nodes;
    std::set<std::string> arcs;
    bool operator<(const OraclePath& o) const {
        return std::tie(nodes, arcs) < std::tie(o.nodes, o.arcs);
    }
    bool operator==(const OraclePath& o) const = default;
};

/// Brute-force cooperation-path enumeration, independent of the engine:
/// every assignment of one incoming hyper-arc per parent node, closed from
/// the root, deduplicated by node/arc set equality.
inline std::vector<OraclePath> oracle_paths(const GraphSpec& g) {
    std::map<std::string, std::vector<const ArcSpec*>> incoming;
    for (const ArcSpec& arc : g.arcs) incoming[arc.parent].push_back(&arc);
    std::set<std::string> child_of_some;
    for (const ArcSpec& arc : g.arcs) {
        child_of_some.insert(arc.children.begin(), arc.children.end());
    }
    std::string root;
    for (const NodeSpec& node : g.nodes) {
        if (!child_of_some.count(node.id)) root = node.id;
    }
    std::vector<std::string> parents;
    for (const auto& [id, arcs] : incoming) parents.push_back(id);

    std::set<OraclePath> unique;
    std::vector<std::size_t> choice(parents.size(), 0);
    for (;;) {
        OraclePath p;
        std::vector<std::string> stack{root};
        p.nodes.insert(root);
        while (!stack.empty()) {
            std::string id = stack.back();
            stack.pop_back();
            auto it = incoming.find(id);
            if (it == incoming.end()) continue;
            std::size_t pi = std::find(parents.begin(), parents.end(), id) - parents.begin();
            const ArcSpec* arc = it->second[choice[pi]];
            p.arcs.insert(arc->id);
            for (const std::string& c : arc->children) {
                if (p.nodes.insert(c).second) stack.push_back(c);
            }
        }
        unique.insert(std::move(p));
        std::size_t i = 0;
        for (; i < parents.size(); ++i) {
            if (++choice[i] < incoming[parents[i]].size()) break;
            choice[i] = 0;
        }
        if (i == parents.size()) break;
    }
    return {unique.begin(), unique.end()};
}

/// Current cost of an oracle path given which items are met/solved.
inline double oracle_path_cost(const OraclePath& p, const GraphSpec& g,
                               const std::set<std::string>& met,
                               const std::set<std::string>& solved) {
    double cost = 0;
    for (const NodeSpec& n : g.nodes) {
        if (p.nodes.count(n.id) && !met.count(n.id)) cost += n.weight;
    }
    for (const ArcSpec& h : g.arcs) {
        if (p.arcs.count(h.id) && !solved.count(h.id)) cost += h.weight;
    }
    return cost;
}

/// Brute-force minimum cost over the oracle paths containing an item.
inline double oracle_min_cost(const std::string& item, bool is_arc,
                              const std::vector<OraclePath>& paths, const GraphSpec& g,
                              const std::set<std::string>& met,
                              const std::set<std::string>& solved) {
    double best = std::numeric_limits<double>::infinity();
    for (const OraclePath& p : paths) {
        bool contains = is_arc ? p.arcs.count(item) > 0 : p.nodes.count(item) > 0;
        if (contains) best = std::min(best, oracle_path_cost(p, g, met, solved));
    }
    return best;
}

inline GraphSpec leg1_graph() { return leg1_fixture().model.graphs[0]; }

/// Sorted multiset of current path costs.
inline std::vector<double> path_costs(const AndOrGraph& g) {
    std::vector<double> out;
    for (const CooperationPath& p : g.cooperation_paths()) out.push_back(p.cost);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace coop::testing

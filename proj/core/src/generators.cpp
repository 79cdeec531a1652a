#include "coopgraph/generators.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace coop {

TableEncoding parse_encoding(const std::string& name) {
    if (name == "standard") return TableEncoding::Standard;
    if (name == "fol") return TableEncoding::Fol;
    if (name == "hierarchical") return TableEncoding::Hierarchical;
    throw ModelError("unknown encoding '" + name + "' (standard|fol|hierarchical)");
}

std::string to_string(TableEncoding e) {
    switch (e) {
        case TableEncoding::Standard: return "standard";
        case TableEncoding::Fol: return "fol";
        case TableEncoding::Hierarchical: return "hierarchical";
    }
    return "?";
}

namespace {

Literal lit(const std::string& text) { return parse_literal(text); }

State state1(const std::string& text) { return State({lit(text)}); }

NodeSpec node(const std::string& id, double w, const std::string& state_text) {
    NodeSpec n;
    n.id = id;
    n.weight = w;
    n.state = state1(state_text);
    return n;
}

ArcSpec arc(const std::string& id, double w, std::vector<std::string> children,
            const std::string& parent, std::vector<std::string> actions) {
    ArcSpec h;
    h.id = id;
    h.weight = w;
    h.children = std::move(children);
    h.parent = parent;
    h.actions = std::move(actions);
    return h;
}

ActionSpec action(const std::string& name, std::vector<std::string> params, AgentSpec::Mode mode,
                  std::vector<std::string> agents, const std::string& pre, const std::string& add,
                  const std::string& del) {
    ActionSpec a;
    a.name = name;
    a.params = std::move(params);
    a.agents.mode = mode;
    a.agents.agents = std::move(agents);
    auto parse_lits = [](const std::string& text) {
        std::vector<Literal> lits;
        std::string cur;
        int depth = 0;
        for (char ch : text) {
            if (ch == '(') depth++;
            if (ch == ')') depth--;
            if (ch == ',' && depth == 0) {
                lits.push_back(lit(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!cur.empty()) lits.push_back(lit(cur));
        return State(std::move(lits));
    };
    if (!pre.empty()) a.pre = parse_lits(pre);
    if (!add.empty()) a.eff_add = parse_lits(add);
    if (!del.empty()) a.eff_del = parse_lits(del);
    return a;
}

/// Leg-connection action schemas shared by the fol and hierarchical
/// encodings (legs grounded online through Leg(?y)).
ActionLibrary table_actions() {
    ActionLibrary lib;
    lib.add(action("place_tt", {"x"}, AgentSpec::Mode::Any, {"R1", "R2"},
                   "TabletopAvailable(?x)", "TabletopPlaced(?x)", "TabletopAvailable(?x)"));
    lib.add(action("pickup", {"y"}, AgentSpec::Mode::Any, {"R1", "R2"}, "Leg(?y),OnTable(?y)",
                   "Held(?y)", "OnTable(?y)"));
    lib.add(action("transport", {"y", "x"}, AgentSpec::Mode::Any, {"R1", "R2"},
                   "Held(?y),Tabletop(?x)", "At(?y,?x)", "Held(?y)"));
    lib.add(action("screw", {"y", "x"}, AgentSpec::Mode::Any, {"R1", "R2"}, "At(?y,?x)",
                   "Connected(?y,?x)", "At(?y,?x)"));
    lib.add(action("to_middle", {"y"}, AgentSpec::Mode::Any, {"R1", "R2"}, "Held(?y)",
                   "AtMiddle(?y)", "Held(?y)"));
    lib.add(action("pickup_mid", {"y"}, AgentSpec::Mode::Any, {"R1", "R2"},
                   "Leg(?y),AtMiddle(?y)", "Held(?y)", "AtMiddle(?y)"));
    lib.add(action("pickup_h", {"y"}, AgentSpec::Mode::Only, {"H"}, "Leg(?y),OnTable(?y)",
                   "Held(?y)", "OnTable(?y)"));
    lib.add(action("screw_h", {"y", "x"}, AgentSpec::Mode::Only, {"H"}, "Held(?y),Tabletop(?x)",
                   "Connected(?y,?x)", "Held(?y)"));
    lib.add(action("pickup_mid_h", {"y"}, AgentSpec::Mode::Only, {"H"}, "Leg(?y),AtMiddle(?y)",
                   "Held(?y)", "AtMiddle(?y)"));
    lib.add(action("inspect", {"x"}, AgentSpec::Mode::Any, {"R1", "R2", "H"}, "Tabletop(?x)",
                   "Inspected(?x)", ""));
    return lib;
}

AgentRoster table_agents() {
    AgentRoster roster;
    auto dur = [](double base, double perm = 0) { return DurationModel{base, perm}; };
    AgentModel r1{"R1", false, 30.0, {}, {}};
    r1.durations = {{"place_tt", dur(2.0)},   {"pickup", dur(0.5)},
                    {"transport", dur(0.8, 0.5)}, {"screw", dur(1.0)},
                    {"to_middle", dur(0.6)},  {"pickup_mid", dur(0.5)},
                    {"inspect", dur(1.0)}};
    AgentModel r2{"R2", false, 30.0, {}, {}};
    r2.durations = {{"place_tt", dur(2.2)},   {"pickup", dur(0.6)},
                    {"transport", dur(0.9, 0.6)}, {"screw", dur(1.2)},
                    {"to_middle", dur(0.7)},  {"pickup_mid", dur(0.6)},
                    {"inspect", dur(1.2)}};
    AgentModel h{"H", true, 30.0, {}, {}};
    h.durations = {{"pickup_h", dur(1.5)},
                   {"screw_h", dur(2.0)},
                   {"pickup_mid_h", dur(1.5)},
                   {"inspect", dur(2.5)}};
    roster.add(std::move(r1));
    roster.add(std::move(r2));
    roster.add(std::move(h));
    return roster;
}

WorldState table_world(int legs) {
    WorldState w;
    w.add_object("T", "Tabletop", {{0.0, 0.0, 0.0}});
    for (int i = 1; i <= legs; ++i) {
        w.add_object("L" + std::to_string(i), "Leg", {{0.4 * i, 0.0, 0.0}});
        w.add_fact(lit("OnTable(L" + std::to_string(i) + ")"));
    }
    w.add_fact(lit("TabletopAvailable(T)"));
    return w;
}

GraphSpec leg_connection_graph() {
    GraphSpec g;
    g.id = "leg";
    g.nodes = {node("n_leg", 0, "LegReady(?y)"), node("n_tt", 0, "BaseReady(?b)"),
               node("n_mid", 0, "LegAtMiddle(?y)"), node("n_conn", 0, "LegConnected(?y)")};
    g.arcs = {
        arc("hB", 1, {"n_leg", "n_tt"}, "n_conn", {"pickup", "transport", "screw"}),
        arc("hR", 2, {"n_leg", "n_tt"}, "n_conn", {"pickup_h", "screw_h"}),
        arc("h1", 1, {"n_leg"}, "n_mid", {"pickup", "to_middle"}),
        arc("h2", 1, {"n_mid", "n_tt"}, "n_conn", {"pickup_mid", "transport", "screw"}),
        arc("h3", 2, {"n_mid", "n_tt"}, "n_conn", {"pickup_mid_h", "screw_h"}),
    };
    return g;
}

/// One leg-fix stage per slot; slots complete strictly in order, matching the
/// fixed bolt order on the tabletop.
GraphSpec fol_table_graph(int legs) {
    GraphSpec g;
    g.id = "table";
    g.nodes.push_back(node("tt_avail", 0, "TabletopAvailable(T)"));
    g.nodes.push_back(node("fixed_0", 0, "TabletopPlaced(T)"));
    for (int i = 1; i <= legs; ++i) {
        const std::string s = std::to_string(i);
        g.nodes.push_back(node("slot_" + s, 0, "SlotReady_" + s));
        g.nodes.push_back(node("mid_" + s, 0, "LegAtMiddle_" + s));
        g.nodes.push_back(node("fixed_" + s, 0, "LegsFixed_" + s));
    }
    g.nodes.push_back(node("done", 0, "TableDone"));
    g.arcs.push_back(arc("tt_place", 1, {"tt_avail"}, "fixed_0", {"place_tt"}));
    for (int i = 1; i <= legs; ++i) {
        const std::string s = std::to_string(i);
        const std::string prev = "fixed_" + std::to_string(i - 1);
        g.arcs.push_back(arc("hB_" + s, 1, {"slot_" + s, prev}, "fixed_" + s,
                             {"pickup", "transport", "screw"}));
        g.arcs.push_back(
            arc("hR_" + s, 2, {"slot_" + s, prev}, "fixed_" + s, {"pickup_h", "screw_h"}));
        g.arcs.push_back(arc("h1_" + s, 1, {"slot_" + s}, "mid_" + s, {"pickup", "to_middle"}));
        g.arcs.push_back(arc("h2_" + s, 1, {"mid_" + s, prev}, "fixed_" + s,
                             {"pickup_mid", "transport", "screw"}));
        g.arcs.push_back(
            arc("h3_" + s, 2, {"mid_" + s, prev}, "fixed_" + s, {"pickup_mid_h", "screw_h"}));
    }
    g.arcs.push_back(
        arc("check", 1, {"fixed_" + std::to_string(legs)}, "done", {"inspect"}));
    return g;
}

ScenarioBundle fol_table(int legs) {
    ScenarioBundle b;
    b.name = "table-fol-" + std::to_string(legs);
    b.model.graphs.push_back(fol_table_graph(legs));
    b.actions = table_actions();
    b.world = table_world(legs);
    b.agents = table_agents();
    return b;
}

ScenarioBundle hierarchical_table(int legs) {
    ScenarioBundle b;
    b.name = "table-hier-" + std::to_string(legs);
    GraphSpec upper;
    upper.id = "table";
    upper.nodes.push_back(node("tt_avail", 0, "TabletopAvailable(T)"));
    upper.nodes.push_back(node("fixed_0", 0, "TabletopPlaced(T)"));
    for (int i = 1; i <= legs; ++i) {
        const std::string s = std::to_string(i);
        upper.nodes.push_back(node("leg_avail_" + s, 0, "LegAvailable_" + s));
        upper.nodes.push_back(node("fixed_" + s, 0, "LegsFixed_" + s));
    }
    upper.nodes.push_back(node("done", 0, "TableDone"));
    upper.arcs.push_back(arc("tt_place", 1, {"tt_avail"}, "fixed_0", {"place_tt"}));
    for (int i = 1; i <= legs; ++i) {
        const std::string s = std::to_string(i);
        upper.arcs.push_back(arc("fix_leg_" + s, 0,
                                 {"leg_avail_" + s, "fixed_" + std::to_string(i - 1)},
                                 "fixed_" + s, {}));
    }
    upper.arcs.push_back(
        arc("check", 1, {"fixed_" + std::to_string(legs)}, "done", {"inspect"}));
    b.model.graphs.push_back(std::move(upper));
    b.model.graphs.push_back(leg_connection_graph());
    for (int i = 1; i <= legs; ++i) {
        const std::string s = std::to_string(i);
        TransitionSpec t;
        t.upper_graph = "table";
        t.upper_arc = "fix_leg_" + s;
        t.lower_graph = "leg";
        t.leaf_map["leg_avail_" + s] = {"n_leg"};
        t.leaf_map["fixed_" + std::to_string(i - 1)] = {"n_tt"};
        t.upper_parent = "fixed_" + s;
        t.lower_root = "n_conn";
        b.model.transitions.push_back(std::move(t));
    }
    b.actions = table_actions();
    b.world = table_world(legs);
    b.agents = table_agents();
    return b;
}

std::string subset_id(unsigned mask) {
    if (mask == 0) return "0";
    std::string out;
    for (int j = 0; j < 9; ++j) {
        if (mask & (1u << j)) out += std::to_string(j + 1);
    }
    return out;
}

/// Every leg a distinct constant, every placement order explicit: one
/// fixed-set node per subset of legs, one middle-pose node per (subset, leg)
/// pair, five grounded hyper-arcs per pair. Starting a middle-pose detour
/// commits the cooperation to finishing that leg before another starts.
ScenarioBundle standard_table(int legs) {
    if (legs > 5) {
        throw ModelError("the standard encoding is capped at 5 legs; modelling more "
                         "is not practical in this encoding");
    }
    ScenarioBundle b;
    b.name = "table-standard-" + std::to_string(legs);
    GraphSpec g;
    g.id = "table";
    g.nodes.push_back(node("tt_avail", 0, "TabletopAvailable(T)"));
    const unsigned full = (1u << legs) - 1;
    for (unsigned mask = 0; mask <= full; ++mask) {
        const std::string sid = subset_id(mask);
        g.nodes.push_back(node("fixed_" + sid, 0,
                               mask == 0 ? "TabletopPlaced(T)" : "LegsFixed_" + sid));
    }
    for (int j = 1; j <= legs; ++j) {
        g.nodes.push_back(node("leg_" + std::to_string(j), 0, "LegOnTable_" + std::to_string(j)));
    }
    for (unsigned mask = 0; mask <= full; ++mask) {
        for (int j = 1; j <= legs; ++j) {
            if (mask & (1u << (j - 1))) continue;
            g.nodes.push_back(node("mid_" + std::to_string(j) + "_" + subset_id(mask), 0,
                                   "LegAtMiddle_" + std::to_string(j) + "_" + subset_id(mask)));
        }
    }
    g.nodes.push_back(node("done", 0, "TableDone"));

    ActionLibrary lib;
    lib.add(action("place_tt_std", {}, AgentSpec::Mode::Any, {"R1", "R2"}, "TabletopAvailable(T)",
                   "TabletopPlaced(T)", "TabletopAvailable(T)"));
    lib.add(action("inspect_std", {}, AgentSpec::Mode::Any, {"R1", "R2", "H"}, "Tabletop(T)",
                   "Inspected(T)", ""));
    for (int j = 1; j <= legs; ++j) {
        const std::string s = std::to_string(j);
        const std::string leg = "L" + s;
        lib.add(action("pickup_" + s, {}, AgentSpec::Mode::Any, {"R1", "R2"},
                       "Leg(" + leg + "),OnTable(" + leg + ")", "Held(" + leg + ")",
                       "OnTable(" + leg + ")"));
        lib.add(action("transport_" + s, {}, AgentSpec::Mode::Any, {"R1", "R2"},
                       "Held(" + leg + ")", "At(" + leg + ",T)", "Held(" + leg + ")"));
        lib.add(action("screw_" + s, {}, AgentSpec::Mode::Any, {"R1", "R2"},
                       "At(" + leg + ",T)", "Connected(" + leg + ",T)", "At(" + leg + ",T)"));
        lib.add(action("to_middle_" + s, {}, AgentSpec::Mode::Any, {"R1", "R2"},
                       "Held(" + leg + ")", "AtMiddle(" + leg + ")", "Held(" + leg + ")"));
        lib.add(action("pickup_mid_" + s, {}, AgentSpec::Mode::Any, {"R1", "R2"},
                       "AtMiddle(" + leg + ")", "Held(" + leg + ")", "AtMiddle(" + leg + ")"));
        lib.add(action("pickup_h_" + s, {}, AgentSpec::Mode::Only, {"H"},
                       "Leg(" + leg + "),OnTable(" + leg + ")", "Held(" + leg + ")",
                       "OnTable(" + leg + ")"));
        lib.add(action("screw_h_" + s, {}, AgentSpec::Mode::Only, {"H"}, "Held(" + leg + ")",
                       "Connected(" + leg + ",T)", "Held(" + leg + ")"));
        lib.add(action("pickup_mid_h_" + s, {}, AgentSpec::Mode::Only, {"H"},
                       "AtMiddle(" + leg + ")", "Held(" + leg + ")", "AtMiddle(" + leg + ")"));
    }

    g.arcs.push_back(arc("tt_place", 1, {"tt_avail"}, "fixed_0", {"place_tt_std"}));
    for (unsigned mask = 0; mask <= full; ++mask) {
        const std::string sid = subset_id(mask);
        for (int j = 1; j <= legs; ++j) {
            if (mask & (1u << (j - 1))) continue;
            const std::string s = std::to_string(j);
            const std::string next = subset_id(mask | (1u << (j - 1)));
            const std::string pair = s + "_" + sid;
            g.arcs.push_back(arc("hB_" + pair, 1, {"leg_" + s, "fixed_" + sid}, "fixed_" + next,
                                 {"pickup_" + s, "transport_" + s, "screw_" + s}));
            g.arcs.push_back(arc("hR_" + pair, 2, {"leg_" + s, "fixed_" + sid}, "fixed_" + next,
                                 {"pickup_h_" + s, "screw_h_" + s}));
            g.arcs.push_back(arc("h1_" + pair, 1, {"leg_" + s, "fixed_" + sid}, "mid_" + pair,
                                 {"pickup_" + s, "to_middle_" + s}));
            g.arcs.push_back(arc("h2_" + pair, 1, {"mid_" + pair}, "fixed_" + next,
                                 {"pickup_mid_" + s, "transport_" + s, "screw_" + s}));
            g.arcs.push_back(arc("h3_" + pair, 2, {"mid_" + pair}, "fixed_" + next,
                                 {"pickup_mid_h_" + s, "screw_h_" + s}));
        }
    }
    g.arcs.push_back(arc("check", 1, {"fixed_" + subset_id(full)}, "done", {"inspect_std"}));
    b.model.graphs.push_back(std::move(g));

    AgentRoster roster;
    auto dur = [](double base) { return DurationModel{base, 0}; };
    AgentModel r1{"R1", false, 30.0, {}, {}};
    AgentModel r2{"R2", false, 30.0, {}, {}};
    AgentModel h{"H", true, 30.0, {}, {}};
    r1.durations["place_tt_std"] = dur(2.0);
    r2.durations["place_tt_std"] = dur(2.2);
    r1.durations["inspect_std"] = dur(1.0);
    r2.durations["inspect_std"] = dur(1.2);
    h.durations["inspect_std"] = dur(2.5);
    for (int j = 1; j <= legs; ++j) {
        const std::string s = std::to_string(j);
        r1.durations["pickup_" + s] = dur(0.5);
        r1.durations["transport_" + s] = dur(0.8 + 0.1 * j);
        r1.durations["screw_" + s] = dur(1.0);
        r1.durations["to_middle_" + s] = dur(0.6);
        r1.durations["pickup_mid_" + s] = dur(0.5);
        r2.durations["pickup_" + s] = dur(0.6);
        r2.durations["transport_" + s] = dur(0.9 + 0.1 * j);
        r2.durations["screw_" + s] = dur(1.2);
        r2.durations["to_middle_" + s] = dur(0.7);
        r2.durations["pickup_mid_" + s] = dur(0.6);
        h.durations["pickup_h_" + s] = dur(1.5);
        h.durations["screw_h_" + s] = dur(2.0);
        h.durations["pickup_mid_h_" + s] = dur(1.5);
    }
    roster.add(std::move(r1));
    roster.add(std::move(r2));
    roster.add(std::move(h));
    b.actions = std::move(lib);
    b.world = table_world(legs);
    b.agents = std::move(roster);
    return b;
}

// --- kitchen --------------------------------------------------------------

struct KitchenDesc {
    std::string id;
    int nodes;
    int arcs;
    int duplicates;                      // OR alternatives of the final arc
    std::vector<std::string> lowers;     // transition targets, assigned to
                                         // tree arcs from a02 upward (or a01
                                         // when every arc is transitioned)
};

/// Builds one synthetic assembly module: a chain of stages consuming leaf
/// parts, with optional duplicate (OR) arcs on the last plain stage.
GraphSpec build_kitchen_desc(const KitchenDesc& d, std::vector<TransitionSpec>& transitions,
                             const std::map<std::string, GraphSpec>& built) {
    const int t = d.arcs - d.duplicates;  // tree arcs
    const int leaves = d.nodes - t;
    assert(t >= 1 && leaves >= 1);
    assert(static_cast<int>(d.lowers.size()) <= t);
    GraphSpec g;
    g.id = d.id;
    auto nid = [&](const std::string& base, int k) { return base + std::to_string(k); };
    for (int i = 1; i <= leaves; ++i) {
        g.nodes.push_back(node(nid("p", i), 0, "St_" + d.id + "_p" + std::to_string(i)));
    }
    for (int i = 1; i <= t - 1; ++i) {
        g.nodes.push_back(node(nid("g", i), 0, "St_" + d.id + "_g" + std::to_string(i)));
    }
    g.nodes.push_back(node("root", 0, "St_" + d.id + "_done"));

    // leaf batches: one for the first stage, then one per stage from the
    // last backwards, leftovers joining the first stage
    std::vector<std::vector<std::string>> batch(t);
    int next_leaf = 1;
    batch[0].push_back(nid("p", next_leaf++));
    int remaining = leaves - 1;
    for (int i = t - 1; i >= 1 && remaining > 0; --i, --remaining) {
        batch[i].push_back(nid("p", next_leaf++));
    }
    while (next_leaf <= leaves) batch[0].push_back(nid("p", next_leaf++));

    int transition_base = (static_cast<int>(d.lowers.size()) == t) ? 0 : 1;
    for (int i = 0; i < t; ++i) {
        std::string aid = "a" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
        std::vector<std::string> children;
        if (i > 0) children.push_back(nid("g", i));
        for (const std::string& leaf : batch[i]) children.push_back(leaf);
        std::string parent = (i + 1 == t) ? "root" : nid("g", i + 1);
        int slot = i - transition_base;
        bool transitioned = slot >= 0 && slot < static_cast<int>(d.lowers.size());
        std::vector<std::string> actions;
        if (!transitioned) actions.push_back("do_" + d.id + "_" + aid);
        g.arcs.push_back(arc(aid, transitioned ? 0 : 1, children, parent, actions));
        if (transitioned) {
            const GraphSpec& lower = built.at(d.lowers[slot]);
            std::vector<std::string> lower_leaves;
            for (const NodeSpec& n : lower.nodes) {
                bool is_parent = false;
                for (const ArcSpec& h : lower.arcs) {
                    if (h.parent == n.id) is_parent = true;
                }
                if (!is_parent) lower_leaves.push_back(n.id);
            }
            TransitionSpec tr;
            tr.upper_graph = d.id;
            tr.upper_arc = aid;
            tr.lower_graph = d.lowers[slot];
            // children map 1:1 onto lower leaves, the last child absorbing
            // the remainder
            assert(children.size() <= lower_leaves.size());
            std::size_t li = 0;
            for (std::size_t c = 0; c < children.size(); ++c) {
                if (c + 1 == children.size()) {
                    for (; li < lower_leaves.size(); ++li) {
                        tr.leaf_map[children[c]].push_back(lower_leaves[li]);
                    }
                } else {
                    tr.leaf_map[children[c]].push_back(lower_leaves[li++]);
                }
            }
            tr.upper_parent = parent;
            tr.lower_root = lower.nodes.back().id;  // "root" is always last
            transitions.push_back(std::move(tr));
        }
    }
    for (int k = 0; k < d.duplicates; ++k) {
        // an OR alternative of the final stage, costlier
        const ArcSpec& last = g.arcs[t - 1];
        std::string aid = "alt" + std::to_string(k + 1);
        g.arcs.push_back(arc(aid, 2, last.children, last.parent, {"do_" + d.id + "_" + aid}));
    }
    return g;
}

}  // namespace

ScenarioBundle generate_kitchen_model() {
    // 32 distinct descriptions over five layers; the shared ones (wall
    // cabinet, cam-lock fittings, bolt/hinge/dowel sets) instantiate once per
    // use, which is what inflates the designed sizes to the online ones.
    std::vector<KitchenDesc> catalog;
    catalog.push_back({"fit_pair", 12, 5, 1, {}});
    catalog.push_back({"bolt_set", 12, 7, 1, {}});
    catalog.push_back({"hinge_set", 13, 8, 1, {}});
    catalog.push_back({"dowel_set", 13, 5, 1, {}});
    catalog.push_back({"fit_cam", 15, 6, 1, {"fit_pair", "fit_pair"}});
    catalog.push_back({"cab_wall", 41, 14, 1, {"fit_cam", "fit_cam"}});
    for (int m = 1; m <= 15; ++m) {
        std::string id = "mod" + std::string(m < 10 ? "0" : "") + std::to_string(m);
        catalog.push_back({id, 15, 6, 1, {}});
    }
    catalog.push_back({"mod16", 10, 7, 0, {"dowel_set", "dowel_set", "dowel_set"}});
    catalog.push_back({"drawer", 16, 7, 0,
                       {"bolt_set", "bolt_set", "bolt_set", "bolt_set", "mod01", "mod02",
                        "mod03"}});
    catalog.push_back({"sink", 16, 7, 0,
                       {"bolt_set", "bolt_set", "bolt_set", "bolt_set", "mod04", "mod05",
                        "mod06"}});
    catalog.push_back({"shelf", 16, 7, 0,
                       {"bolt_set", "bolt_set", "bolt_set", "bolt_set", "hinge_set", "hinge_set",
                        "hinge_set"}});
    catalog.push_back({"frame", 16, 7, 0,
                       {"bolt_set", "bolt_set", "bolt_set", "bolt_set", "hinge_set", "hinge_set",
                        "hinge_set"}});
    catalog.push_back({"faucet", 16, 7, 1, {"mod07", "mod08", "mod09"}});
    catalog.push_back({"strainer", 16, 7, 1, {"mod10", "mod11", "mod12"}});
    catalog.push_back({"counter", 16, 7, 1, {"mod13", "mod14"}});
    catalog.push_back({"plumb", 16, 7, 1, {"mod15", "mod16"}});
    catalog.push_back({"base", 30, 12, 1,
                       {"drawer", "sink", "shelf", "frame", "faucet", "strainer", "counter",
                        "plumb"}});

    ScenarioBundle b;
    b.name = "kitchen";
    std::map<std::string, GraphSpec> built;
    for (const KitchenDesc& d : catalog) {
        GraphSpec g = build_kitchen_desc(d, b.model.transitions, built);
        built.emplace(d.id, g);
        b.model.graphs.push_back(std::move(g));
    }

    // top layer: three wall cabinets (large, small, wide) share one
    // description; the base cabinet has its own deeper subtree
    GraphSpec top;
    top.id = "kitchen";
    top.nodes = {node("p_wall_a", 0, "St_kitchen_parts_a"),
                 node("p_wall_b", 0, "St_kitchen_parts_b"),
                 node("p_wall_c", 0, "St_kitchen_parts_c"),
                 node("p_base", 0, "St_kitchen_parts_base"),
                 node("cab_a", 0, "St_kitchen_cab_a"),
                 node("cab_b", 0, "St_kitchen_cab_b"),
                 node("cab_c", 0, "St_kitchen_cab_c"),
                 node("cab_base_done", 0, "St_kitchen_cab_base"),
                 node("root", 0, "St_kitchen_done")};
    top.arcs = {arc("h1", 0, {"p_wall_a"}, "cab_a", {}),
                arc("h2", 0, {"p_wall_b"}, "cab_b", {}),
                arc("h3", 0, {"p_wall_c"}, "cab_c", {}),
                arc("h4", 0, {"p_base"}, "cab_base_done", {}),
                arc("h5", 1, {"cab_a", "cab_b", "cab_c", "cab_base_done"}, "root",
                    {"do_kitchen_install"})};
    auto top_transition = [&](const std::string& arc_id, const std::string& child,
                              const std::string& parent, const std::string& lower) {
        TransitionSpec tr;
        tr.upper_graph = "kitchen";
        tr.upper_arc = arc_id;
        tr.lower_graph = lower;
        const GraphSpec& lg = built.at(lower);
        std::set<std::string> parents;
        for (const ArcSpec& h : lg.arcs) parents.insert(h.parent);
        for (const NodeSpec& n : lg.nodes) {
            if (!parents.count(n.id)) tr.leaf_map[child].push_back(n.id);
        }
        tr.upper_parent = parent;
        tr.lower_root = "root";
        b.model.transitions.push_back(std::move(tr));
    };
    top_transition("h1", "p_wall_a", "cab_a", "cab_wall");
    top_transition("h2", "p_wall_b", "cab_b", "cab_wall");
    top_transition("h3", "p_wall_c", "cab_c", "cab_wall");
    top_transition("h4", "p_base", "cab_base_done", "base");
    b.model.graphs.push_back(std::move(top));
    return b;
}

std::pair<std::size_t, std::size_t> designed_size(const ScenarioBundle& bundle) {
    std::size_t nodes = 0, arcs = 0;
    for (const GraphSpec& g : bundle.model.graphs) {
        nodes += g.nodes.size();
        arcs += g.arcs.size();
    }
    return {nodes, arcs};
}

ScenarioBundle generate_table_model(int legs, TableEncoding encoding) {
    if (legs < 1 || legs > 9) throw ModelError("legs must be between 1 and 9");
    switch (encoding) {
        case TableEncoding::Standard: return standard_table(legs);
        case TableEncoding::Fol: return fol_table(legs);
        case TableEncoding::Hierarchical: return hierarchical_table(legs);
    }
    throw ModelError("bad encoding");
}

ScenarioBundle leg1_fixture() {
    ScenarioBundle b;
    b.name = "leg1";
    b.model.graphs.push_back(leg_connection_graph());
    b.actions = table_actions();
    WorldState w;
    w.add_object("T", "Tabletop", {{0.0, 0.0, 0.0}});
    w.add_object("A", "Leg", {{0.5, 0.4, 0.0}});
    w.add_fact(lit("OnTable(A)"));
    b.world = std::move(w);
    b.agents = table_agents();
    std::vector<Event> trace;
    for (int i = 1; i <= 3; ++i) {
        Event ev;
        ev.kind = Event::Kind::RobotAck;
        ev.ok = true;
        ev.time = i;
        trace.push_back(ev);
    }
    b.trace = std::move(trace);
    return b;
}

ScenarioBundle decision_fixture() {
    ScenarioBundle b;
    b.name = "decision";
    GraphSpec g;
    g.id = "assembly";
    g.nodes = {node("lg_ready", 0, "LegsOnTable"), node("tt_ready", 0, "TabletopInPlace"),
               node("leg_conn", 0, "LegConnectedToTabletop")};
    g.arcs = {arc("h1", 5, {"lg_ready", "tt_ready"}, "leg_conn",
                  {"d_pickup", "d_transport", "d_screw"}),
              arc("h2", 7, {"lg_ready", "tt_ready"}, "leg_conn", {"d_pickup_h", "d_screw_h"}),
              arc("h3", 6, {"lg_ready", "tt_ready"}, "leg_conn", {"d_to_front", "d_screw_h"})};
    b.model.graphs.push_back(std::move(g));

    ActionLibrary lib;
    lib.add(action("d_pickup", {"y"}, AgentSpec::Mode::Any, {"R1", "R2"}, "Leg(?y),OnTable(?y)",
                   "Held(?y)", "OnTable(?y)"));
    lib.add(action("d_transport", {"y", "x"}, AgentSpec::Mode::Any, {"R1", "R2"},
                   "Held(?y),Tabletop(?x)", "At(?y,?x)", "Held(?y)"));
    lib.add(action("d_screw", {"y", "x"}, AgentSpec::Mode::Any, {"R1", "R2"}, "At(?y,?x)",
                   "Connected(?y,?x)", "At(?y,?x)"));
    lib.add(action("d_pickup_h", {"y"}, AgentSpec::Mode::Only, {"H"}, "Leg(?y),OnTable(?y)",
                   "Held(?y)", "OnTable(?y)"));
    lib.add(action("d_screw_h", {"y", "x"}, AgentSpec::Mode::Only, {"H"},
                   "Held(?y),Tabletop(?x)", "Connected(?y,?x)", "Held(?y)"));
    lib.add(action("d_to_front", {"y"}, AgentSpec::Mode::Any, {"R1", "R2"},
                   "Leg(?y),OnTable(?y)", "Held(?y)", "OnTable(?y)"));
    b.actions = std::move(lib);

    WorldState w;
    w.add_object("T", "Tabletop", {{0.0, 0.0, 0.0}});
    w.add_object("A", "Leg", {{1.0, 0.0, 0.0}});
    w.add_object("B", "Leg", {{0.4, 0.0, 0.0}});
    w.add_fact(lit("OnTable(A)"));
    w.add_fact(lit("OnTable(B)"));
    b.world = std::move(w);

    AgentRoster roster;
    auto dur = [](double base, double perm = 0) { return DurationModel{base, perm}; };
    AgentModel r1{"R1", false, 30.0, {}, {}};
    r1.durations = {{"d_pickup", dur(0.1)},
                    {"d_transport", dur(0.1, 0.25)},
                    {"d_screw", dur(0.1)},
                    {"d_to_front", dur(0.3)}};
    AgentModel r2{"R2", false, 30.0, {}, {}};
    r2.durations = {{"d_pickup", dur(0.15)},
                    {"d_transport", dur(0.15, 0.3)},
                    {"d_screw", dur(0.15)},
                    {"d_to_front", dur(0.35)}};
    AgentModel h{"H", true, 30.0, {}, {}};
    h.durations = {{"d_pickup_h", dur(1.5)}, {"d_screw_h", dur(2.0)}};
    roster.add(std::move(r1));
    roster.add(std::move(r2));
    roster.add(std::move(h));
    b.agents = std::move(roster);
    return b;
}

}  // namespace coop

#include <doctest.h>

#include <set>

#include "helpers.hpp"

using namespace coop;
using namespace coop::testing;

namespace {

bool has_violation(const std::vector<Violation>& vs, Violation::Code code) {
    for (const Violation& v : vs) {
        if (v.code == code) return true;
    }
    return false;
}

/// Marks both leaves met, as the task manager's met-state check would.
void bootstrap_leaves(AndOrGraph& g) {
    for (const std::string& leaf : g.leaves()) {
        REQUIRE(g.mark_node_met(leaf));
        g.update_node_feasibility(leaf);
    }
}

void solve_arc(AndOrGraph& g, const std::string& arc) {
    g.complete_actions(arc);
    REQUIRE(g.mark_hyperarc_solved(arc));
    g.update_hyperarc_feasibility(arc);
}

}  // namespace

TEST_CASE("validate: the leg fixture is clean") {
    CHECK(validate_graph(leg1_graph()).empty());
}

TEST_CASE("validate: structural violations are reported as data") {
    GraphSpec two_roots;
    two_roots.id = "g";
    two_roots.nodes = {NodeSpec{"a", State({parse_literal("A")}), {}, 0},
                       NodeSpec{"b", State({parse_literal("B")}), {}, 0}};
    CHECK(has_violation(validate_graph(two_roots), Violation::Code::MultipleRoots));

    GraphSpec self_loop;
    self_loop.id = "g";
    self_loop.nodes = {NodeSpec{"a", State({parse_literal("A")}), {}, 0},
                       NodeSpec{"b", State({parse_literal("B")}), {}, 0}};
    self_loop.arcs = {ArcSpec{"h", {"a", "b"}, "b", {"act"}, 1}};
    CHECK(has_violation(validate_graph(self_loop), Violation::Code::SelfLoop));

    GraphSpec cyclic;
    cyclic.id = "g";
    cyclic.nodes = {NodeSpec{"a", State({parse_literal("A")}), {}, 0},
                    NodeSpec{"b", State({parse_literal("B")}), {}, 0},
                    NodeSpec{"r", State({parse_literal("R")}), {}, 0}};
    cyclic.arcs = {ArcSpec{"h1", {"a"}, "b", {"act"}, 1},
                   ArcSpec{"h2", {"b"}, "a", {"act"}, 1},
                   ArcSpec{"h3", {"a"}, "r", {"act"}, 1}};
    CHECK(has_violation(validate_graph(cyclic), Violation::Code::Cycle));

    GraphSpec dangling;
    dangling.id = "g";
    dangling.nodes = {NodeSpec{"a", State({parse_literal("A")}), {}, 0}};
    dangling.arcs = {ArcSpec{"h", {"missing"}, "a", {"act"}, 1}};
    CHECK(has_violation(validate_graph(dangling), Violation::Code::UnknownNodeRef));

    GraphSpec negative = leg1_graph();
    negative.arcs[0].weight = -1;
    CHECK(has_violation(validate_graph(negative), Violation::Code::NegativeWeight));
}

TEST_CASE("path enumeration on the leg fixture: blue 1, red 2, black 2, green 3") {
    AndOrGraph g(leg1_graph());
    REQUIRE(g.path_count() == 4);
    CHECK(path_costs(g) == std::vector<double>{1, 2, 2, 3});

    // colours by membership
    for (const CooperationPath& p : g.cooperation_paths()) {
        std::set<std::string> arcs(p.hyperarcs.begin(), p.hyperarcs.end());
        if (arcs.count("hB")) CHECK(p.cost == 1);        // blue: robot direct
        if (arcs.count("hR")) CHECK(p.cost == 2);        // red: human direct
        if (arcs.count("h2")) CHECK(p.cost == 2);        // black: robot via middle
        if (arcs.count("h3")) CHECK(p.cost == 3);        // green: human via middle
    }
}

TEST_CASE("path enumeration: single node graph") {
    GraphSpec g;
    g.id = "one";
    g.nodes = {NodeSpec{"only", State({parse_literal("Done")}), {}, 3}};
    AndOrGraph built(g);
    REQUIRE(built.path_count() == 1);
    CHECK(built.cooperation_paths()[0].cost == 3);
    CHECK(built.root() == "only");
}

TEST_CASE("path enumeration matches the brute-force oracle on random graphs") {
    SplitMix64 rng(7);
    for (int iter = 0; iter < 250; ++iter) {
        GraphSpec spec = random_graph_spec(rng);
        REQUIRE(validate_graph(spec).empty());
        AndOrGraph g(spec);
        auto expected = oracle_paths(spec);
        std::set<OraclePath> got;
        for (const CooperationPath& p : g.cooperation_paths()) {
            OraclePath o;
            o.nodes.insert(p.nodes.begin(), p.nodes.end());
            o.arcs.insert(p.hyperarcs.begin(), p.hyperarcs.end());
            got.insert(std::move(o));
        }
        CHECK(got == std::set<OraclePath>(expected.begin(), expected.end()));
    }
}

TEST_CASE("path cost drops as members are met or solved") {
    AndOrGraph g(leg1_graph());
    std::size_t black = 0, blue = 0;
    for (std::size_t i = 0; i < g.path_count(); ++i) {
        const auto paths = g.cooperation_paths();
        std::set<std::string> arcs(paths[i].hyperarcs.begin(), paths[i].hyperarcs.end());
        if (arcs.count("h2")) black = i;
        if (arcs.count("hB")) blue = i;
    }
    CHECK(g.path_cost(blue) == 1);

    bootstrap_leaves(g);
    solve_arc(g, "h1");
    CHECK(g.path_cost(black) == 1);  // 2 - w(h1)
    CHECK(g.path_cost_cached(black) == 1);

    // drive the black route to completion: every member met/solved
    REQUIRE(g.mark_node_met("n_mid"));
    g.update_node_feasibility("n_mid");
    solve_arc(g, "h2");
    REQUIRE(g.mark_node_met("n_conn"));
    g.update_node_feasibility("n_conn");
    CHECK(g.path_cost(black) == 0);
}

TEST_CASE("update_node_feasibility follows the met/unmet branches") {
    SUBCASE("meeting both leaves enables the direct hyper-arcs") {
        AndOrGraph g(leg1_graph());
        REQUIRE(g.mark_node_met("n_leg"));
        g.update_node_feasibility("n_leg");
        REQUIRE(g.mark_node_met("n_tt"));
        g.update_node_feasibility("n_tt");
        CHECK(g.feasible_arc("hB"));
        CHECK(g.feasible_arc("hR"));
        CHECK(g.feasible_arc("h1"));  // its only child is met
        CHECK_FALSE(g.feasible_arc("h2"));
    }
    SUBCASE("an unmet leaf is feasible") {
        AndOrGraph g(leg1_graph());
        g.update_node_feasibility("n_leg");
        CHECK(g.feasible_node("n_leg"));
    }
    SUBCASE("an unmet non-leaf without a solved incoming hyper-arc is not") {
        AndOrGraph g(leg1_graph());
        g.update_node_feasibility("n_conn");
        CHECK_FALSE(g.feasible_node("n_conn"));
    }
}

TEST_CASE("update_hyperarc_feasibility: solved and unsolved branches") {
    SUBCASE("solving hB frees its parent and kills every sharing sibling") {
        AndOrGraph g(leg1_graph());
        bootstrap_leaves(g);
        solve_arc(g, "hB");
        CHECK(g.feasible_node("n_conn"));
        CHECK_FALSE(g.feasible_arc("hR"));
        CHECK_FALSE(g.feasible_arc("h1"));
    }
    SUBCASE("children not all met keeps the arc unfeasible") {
        AndOrGraph g(leg1_graph());
        g.update_hyperarc_feasibility("h2");
        CHECK_FALSE(g.feasible_arc("h2"));
    }
    SUBCASE("all children met with no solved sibling makes it feasible") {
        AndOrGraph g(leg1_graph());
        bootstrap_leaves(g);
        g.update_hyperarc_feasibility("hR");
        CHECK(g.feasible_arc("hR"));
    }
}

TEST_CASE("sibling exclusion survives later met events") {
    // a solved one-child alternative must keep excluding its sibling even
    // after the sibling's remaining child is met
    GraphSpec spec;
    spec.id = "excl";
    auto st = [](const std::string& s) { return State({parse_literal(s)}); };
    spec.nodes = {NodeSpec{"a", st("A"), {}, 0}, NodeSpec{"b", st("B"), {}, 0},
                  NodeSpec{"p", st("P"), {}, 0}, NodeSpec{"r", st("R"), {}, 0}};
    spec.arcs = {ArcSpec{"h1", {"a", "b"}, "p", {"x"}, 1},
                 ArcSpec{"h3", {"a"}, "p", {"y"}, 1},
                 ArcSpec{"top", {"p", "b"}, "r", {"z"}, 1}};
    AndOrGraph g(spec);
    REQUIRE(g.mark_node_met("a"));
    g.update_node_feasibility("a");
    solve_arc(g, "h3");
    CHECK_FALSE(g.feasible_arc("h1"));
    REQUIRE(g.mark_node_met("b"));
    g.update_node_feasibility("b");
    CHECK_FALSE(g.feasible_arc("h1"));  // not resurrected
}

TEST_CASE("mark_node_met is gated by feasibility and processes") {
    GraphSpec spec = leg1_graph();
    spec.nodes[0].processes = {"hold_leg"};
    AndOrGraph g(spec);

    SUBCASE("feasible leaf with no processes") {
        CHECK(g.mark_node_met("n_tt"));
        CHECK(g.met("n_tt"));
        CHECK_FALSE(g.feasible_node("n_tt"));
    }
    SUBCASE("infeasible node is left unchanged") {
        CHECK_FALSE(g.mark_node_met("n_conn"));
        CHECK_FALSE(g.met("n_conn"));
    }
    SUBCASE("an active process blocks the marking") {
        CHECK_FALSE(g.mark_node_met("n_leg"));
        g.deactivate_process("n_leg", "hold_leg");
        CHECK(g.mark_node_met("n_leg"));
    }
    SUBCASE("unknown ids throw") {
        CHECK_THROWS_AS(g.mark_node_met("nope"), UnknownNode);
        CHECK_THROWS_AS(g.mark_hyperarc_solved("nope"), UnknownHyperarc);
    }
}

TEST_CASE("mark_hyperarc_solved requires done actions in list order") {
    AndOrGraph g(leg1_graph());
    bootstrap_leaves(g);

    SUBCASE("in order") {
        g.mark_action_done("hB", "pickup");
        g.mark_action_done("hB", "transport");
        g.mark_action_done("hB", "screw");
        CHECK(g.mark_hyperarc_solved("hB"));
    }
    SUBCASE("a permuted completion sequence blocks solving") {
        g.mark_action_done("hB", "transport");
        g.mark_action_done("hB", "pickup");
        g.mark_action_done("hB", "screw");
        CHECK_FALSE(g.mark_hyperarc_solved("hB"));
    }
    SUBCASE("an infeasible hyper-arc stays unsolved") {
        g.complete_actions("h2");
        CHECK_FALSE(g.mark_hyperarc_solved("h2"));
    }
}

TEST_CASE("find_suggestions reports minimum path costs for feasible items") {
    AndOrGraph g(leg1_graph());
    bootstrap_leaves(g);
    auto suggestions = g.find_suggestions();
    REQUIRE(suggestions.size() == 3);
    CHECK(suggestions[0].item == "hB");
    CHECK(suggestions[0].cost == 1);
    CHECK(suggestions[1].item == "h1");
    CHECK(suggestions[1].cost == 2);  // its best path is the black one
    CHECK(suggestions[2].item == "hR");
    CHECK(suggestions[2].cost == 2);

    for (const std::string& arc : g.arc_ids()) g.force_unfeasible_arc(arc);
    for (const std::string& node : g.node_ids()) g.force_unfeasible_node(node);
    CHECK(g.find_suggestions().empty());
}

TEST_CASE("suggestion costs equal the brute-force minimum on random graphs") {
    SplitMix64 rng(99);
    for (int iter = 0; iter < 120; ++iter) {
        GraphSpec spec = random_graph_spec(rng);
        AndOrGraph g(spec);
        auto paths = oracle_paths(spec);
        std::set<std::string> met, solved;
        for (int step = 0; step < 20; ++step) {
            for (const Suggestion& s : g.find_suggestions()) {
                double expected =
                    oracle_min_cost(s.item, s.is_arc, paths, spec, met, solved);
                CHECK(s.cost == expected);
            }
            auto sugg = g.find_suggestions();
            if (sugg.empty() || g.solved()) break;
            const Suggestion& pick = sugg[rng.below(sugg.size())];
            if (pick.is_arc) {
                g.complete_actions(pick.item);
                std::vector<std::string> solve{pick.item};
                g.online_phase({}, solve);
                solved.insert(pick.item);
            } else {
                std::vector<std::string> met_ids{pick.item};
                g.online_phase(met_ids, {});
                met.insert(pick.item);
            }
        }
    }
}

TEST_CASE("online_phase implements the solved/failed/suggestions contract") {
    SUBCASE("post-bootstrap query suggests the blue hyper-arc at cost 1") {
        AndOrGraph g(leg1_graph());
        std::vector<std::string> leaves = g.leaves();
        auto result = g.online_phase(leaves, {});
        REQUIRE(result.status == PhaseStatus::Suggestions);
        auto again = g.online_phase({}, {});
        REQUIRE(again.status == PhaseStatus::Suggestions);
        CHECK(again.suggestions[0].item == "hB");
        CHECK(again.suggestions[0].cost == 1);
    }
    SUBCASE("meeting the root solves the graph") {
        AndOrGraph g(leg1_graph());
        g.online_phase(g.leaves(), {});
        g.complete_actions("hB");
        std::vector<std::string> solve{"hB"};
        g.online_phase({}, solve);
        std::vector<std::string> root{"n_conn"};
        auto result = g.online_phase(root, {});
        CHECK(result.status == PhaseStatus::Solved);
        CHECK(g.solved());
    }
    SUBCASE("no feasible items anywhere is a failed cooperation") {
        AndOrGraph g(leg1_graph());
        for (const std::string& arc : g.arc_ids()) g.force_unfeasible_arc(arc);
        for (const std::string& node : g.node_ids()) g.force_unfeasible_node(node);
        auto result = g.online_phase({}, {});
        CHECK(result.status == PhaseStatus::Failed);
    }
    SUBCASE("stale events are ignored") {
        AndOrGraph g(leg1_graph());
        std::vector<std::string> bogus{"n_conn"};  // not feasible yet
        auto result = g.online_phase(bogus, {});
        CHECK(result.status == PhaseStatus::Suggestions);
        CHECK_FALSE(g.met("n_conn"));
    }
}

namespace {

/// Replays a random solvable run while checking the spec invariants after
/// every operation; returns the event sequence.
struct Step {
    std::string item;
    bool is_arc;
};

void check_exclusivity(const AndOrGraph& g) {
    for (const std::string& n : g.node_ids()) {
        CHECK_FALSE((g.met(n) && g.feasible_node(n)));
    }
    for (const std::string& h : g.arc_ids()) {
        CHECK_FALSE((g.solved(h) && g.feasible_arc(h)));
    }
}

void check_sibling_exclusion(const AndOrGraph& g, const GraphSpec& spec) {
    for (const ArcSpec& a : spec.arcs) {
        if (!g.solved(a.id)) continue;
        for (const ArcSpec& b : spec.arcs) {
            if (a.id == b.id) continue;
            bool share = false;
            for (const std::string& c : a.children) {
                if (std::find(b.children.begin(), b.children.end(), c) != b.children.end()) {
                    share = true;
                }
            }
            if (share) CHECK_FALSE(g.feasible_arc(b.id));
        }
    }
}

void check_cost_consistency(const AndOrGraph& g) {
    for (std::size_t i = 0; i < g.path_count(); ++i) {
        CHECK(g.path_cost(i) == g.path_cost_cached(i));
    }
}

/// Runs a random traversal; some random graphs genuinely dead-end under
/// sibling exclusion, so a Failed outcome returns nullopt.
std::optional<std::vector<Step>> random_solved_run(const GraphSpec& spec, std::uint64_t seed,
                                                   bool check_invariants) {
    SplitMix64 rng(seed);
    AndOrGraph g(spec);
    std::vector<Step> steps;
    for (;;) {
        auto result = g.online_phase({}, {});
        if (check_invariants) {
            check_exclusivity(g);
            check_sibling_exclusion(g, spec);
            check_cost_consistency(g);
        }
        if (result.status == PhaseStatus::Solved) return steps;
        if (result.status == PhaseStatus::Failed) return std::nullopt;
        const Suggestion& pick = result.suggestions[rng.below(result.suggestions.size())];
        steps.push_back({pick.item, pick.is_arc});
        if (pick.is_arc) {
            g.complete_actions(pick.item);
            std::vector<std::string> solve{pick.item};
            g.online_phase({}, solve);
        } else {
            std::vector<std::string> met{pick.item};
            g.online_phase(met, {});
        }
    }
}

}  // namespace

TEST_CASE("exclusivity, sibling exclusion and cost consistency hold under random runs") {
    SplitMix64 seeds(1234);
    for (int iter = 0; iter < 40; ++iter) {
        GraphSpec spec = random_graph_spec(seeds);
        random_solved_run(spec, seeds.next(), true);
    }
}

TEST_CASE("monotone progress: prefixes of a solving run never fail") {
    SplitMix64 seeds(555);
    int solved_runs = 0;
    for (int iter = 0; iter < 40 && solved_runs < 20; ++iter) {
        GraphSpec spec = random_graph_spec(seeds);
        auto maybe_steps = random_solved_run(spec, seeds.next(), false);
        if (!maybe_steps) continue;
        ++solved_runs;
        const auto& steps = *maybe_steps;
        for (std::size_t prefix = 0; prefix <= steps.size(); ++prefix) {
            AndOrGraph g(spec);
            for (std::size_t i = 0; i < prefix; ++i) {
                auto result = g.online_phase({}, {});
                REQUIRE(result.status == PhaseStatus::Suggestions);
                if (steps[i].is_arc) {
                    g.complete_actions(steps[i].item);
                    std::vector<std::string> solve{steps[i].item};
                    g.online_phase({}, solve);
                } else {
                    std::vector<std::string> met{steps[i].item};
                    g.online_phase(met, {});
                }
            }
            auto result = g.online_phase({}, {});
            CHECK(result.status != PhaseStatus::Failed);
        }
    }
    CHECK(solved_runs >= 20);
}

TEST_CASE("identical inputs produce identical suggestion sequences") {
    SplitMix64 seeds(31337);
    GraphSpec spec = random_graph_spec(seeds);
    auto run = [&spec](std::uint64_t seed) {
        SplitMix64 rng(seed);
        AndOrGraph g(spec);
        std::string log;
        for (;;) {
            auto result = g.online_phase({}, {});
            if (result.status != PhaseStatus::Suggestions) return log;
            for (const Suggestion& s : result.suggestions) {
                log += s.item + "@" + std::to_string(s.cost) + ";";
            }
            const Suggestion& pick = result.suggestions[rng.below(result.suggestions.size())];
            if (pick.is_arc) {
                g.complete_actions(pick.item);
                std::vector<std::string> solve{pick.item};
                g.online_phase({}, solve);
            } else {
                std::vector<std::string> met{pick.item};
                g.online_phase(met, {});
            }
        }
    };
    CHECK(run(42) == run(42));
}

TEST_CASE("the path cap guards enumeration blow-up") {
    GraphSpec spec = leg1_graph();
    CHECK_THROWS_AS(AndOrGraph(spec, 2), ModelTooLarge);
}

#include <doctest.h>

#include "coopgraph/scenario.hpp"
#include "helpers.hpp"

using namespace coop;
using namespace coop::testing;

namespace {

/// Engine for the grounding walkthrough fixture, queried until its three
/// hyper-arc rows are on the table.
struct DecisionRig {
    ScenarioBundle bundle = decision_fixture();
    HierGraph model = build_model(bundle);
    CooperationEngine engine{model, *bundle.actions, *bundle.world, *bundle.agents};

    DecisionRig() {
        REQUIRE(engine.query() == PhaseStatus::Suggestions);
        REQUIRE_FALSE(engine.stage_met_states().empty());  // the two leaves
        REQUIRE(engine.query() == PhaseStatus::Suggestions);
    }
};

}  // namespace

TEST_CASE("the action-state table mirrors the suggestions, cheapest first") {
    DecisionRig rig;
    const auto& rows = rig.engine.table().rows();
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].item == "h1");
    CHECK(rows[0].cost == 5);
    CHECK(rows[1].item == "h3");
    CHECK(rows[1].cost == 6);
    CHECK(rows[2].item == "h2");
    CHECK(rows[2].cost == 7);
    for (const TableRow& row : rows) {
        for (bool done : row.done) CHECK_FALSE(done);
    }
    CHECK(rig.engine.table().select_optimal() == 0);  // h1
}

TEST_CASE("an empty suggestion set yields an empty table") {
    ActionLibrary lib;
    HierGraph model = HierGraph::single(leg1_graph());
    auto table = ActionStateTable::build({}, model, lib);
    CHECK(table.empty());
    CHECK_FALSE(table.select_optimal().has_value());
}

TEST_CASE("unknown actions on a suggested row are an error") {
    HierGraph model = HierGraph::single(leg1_graph());
    ActionLibrary empty;
    std::vector<HierSuggestion> sugg{{"hB", true, 1, "leg"}};
    CHECK_THROWS_AS(ActionStateTable::build(sugg, model, empty), UnknownAction);
}

TEST_CASE("leg fixture rows after bootstrap: hB 1, h1 2, hR 2") {
    ScenarioBundle bundle = leg1_fixture();
    HierGraph model = build_model(bundle);
    CooperationEngine engine(model, *bundle.actions, *bundle.world, *bundle.agents);
    REQUIRE(engine.query() == PhaseStatus::Suggestions);
    engine.stage_met_states();
    REQUIRE(engine.query() == PhaseStatus::Suggestions);
    const auto& rows = engine.table().rows();
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].item == "hB");
    CHECK(rows[0].cost == 1);
    CHECK(rows[1].item == "h1");
    CHECK(rows[1].cost == 2);
    CHECK(rows[2].item == "hR");
    CHECK(rows[2].cost == 2);
}

TEST_CASE("decision tree: groundings x shared agent choice") {
    DecisionRig rig;
    const TableRow& h1 = rig.engine.table().rows()[0];

    SUBCASE("the walkthrough row ramifies to four branches") {
        auto branches = generate_decision_tree(h1, *rig.bundle.actions, rig.engine.world(),
                                               rig.engine.roster());
        CHECK(branches.size() == 4);  // {T} x {A,B} x {R1,R2}
    }
    SUBCASE("single grounding, single agent: one branch") {
        const TableRow& h2 = rig.engine.table().rows()[2];
        Substitution pin;
        pin.bind("y", "B");
        auto branches = generate_decision_tree(h2, *rig.bundle.actions, rig.engine.world(),
                                               rig.engine.roster(), pin);
        CHECK(branches.size() == 1);  // only(H), ?y pinned, ?x unique
    }
    SUBCASE("three legs, two agents, one tabletop: six branches") {
        WorldState w = *rig.bundle.world;
        w.add_object("C", "Leg", {{0.0, 1.0, 0.0}});
        w.add_fact(parse_literal("OnTable(C)"));
        auto branches =
            generate_decision_tree(h1, *rig.bundle.actions, w, rig.engine.roster());
        CHECK(branches.size() == 6);
    }
    SUBCASE("a variable with no candidates reports NoGrounding") {
        WorldState empty;
        CHECK_THROWS_AS(generate_decision_tree(h1, *rig.bundle.actions, empty,
                                               rig.engine.roster()),
                        NoGrounding);
    }
}

TEST_CASE("utility evaluation reproduces the walkthrough numbers") {
    DecisionRig rig;
    TableRow h1 = rig.engine.table().rows()[0];
    auto branches =
        generate_decision_tree(h1, *rig.bundle.actions, rig.engine.world(), rig.engine.roster());
    evaluate_decision_tree(branches, h1, *rig.bundle.actions, rig.engine.world(),
                           rig.engine.roster());

    SUBCASE("the best branch grounds leg B with robot R1 at J = 2.5") {
        auto update = update_optimal_state(h1, branches);
        REQUIRE(update.grounded);
        const DecisionBranch& best = branches[update.branch_index];
        CHECK(best.grounding.lookup("y") == "B");
        CHECK(best.grounding.lookup("x") == "T");
        REQUIRE_FALSE(best.assignees.empty());
        CHECK(best.assignees[0] == std::vector<std::string>{"R1"});
        CHECK(best.utility == doctest::Approx(2.5).epsilon(1e-9));
        CHECK(h1.grounded);
    }
    SUBCASE("all-success branches rank by total time") {
        for (const DecisionBranch& a : branches) {
            for (const DecisionBranch& b : branches) {
                if (a.utility > 0 && b.utility > 0 && a.utility > b.utility) {
                    CHECK(a.total_seconds < b.total_seconds);
                }
            }
        }
    }
    SUBCASE("any failure zeroes the branch") {
        AgentRoster failing = rig.engine.roster();
        AgentModel r1 = failing.get("R1");
        AgentModel r2 = failing.get("R2");
        r1.failures.push_back({"d_transport", {}});
        r2.failures.push_back({"d_transport", {}});
        failing.add(r1);
        failing.add(r2);
        auto failed = generate_decision_tree(h1, *rig.bundle.actions, rig.engine.world(), failing);
        evaluate_decision_tree(failed, h1, *rig.bundle.actions, rig.engine.world(), failing);
        for (const DecisionBranch& b : failed) CHECK(b.utility == 0);
        auto update = update_optimal_state(h1, failed);
        CHECK_FALSE(update.grounded);  // row infeasible, selection retries
    }
}

TEST_CASE("argmax is invariant under uniform duration scaling") {
    DecisionRig rig;
    TableRow h1 = rig.engine.table().rows()[0];
    auto branches =
        generate_decision_tree(h1, *rig.bundle.actions, rig.engine.world(), rig.engine.roster());
    evaluate_decision_tree(branches, h1, *rig.bundle.actions, rig.engine.world(),
                           rig.engine.roster());
    auto base = update_optimal_state(h1, branches);

    AgentRoster scaled = rig.engine.roster();
    for (const std::string& id : scaled.ids()) {
        AgentModel m = scaled.get(id);
        for (auto& [action, d] : m.durations) {
            d.base_seconds *= 3;
            d.seconds_per_metre *= 3;
        }
        m.timeout_seconds *= 3;
        scaled.add(m);
    }
    TableRow fresh = rig.engine.table().rows()[0];
    auto scaled_branches =
        generate_decision_tree(fresh, *rig.bundle.actions, rig.engine.world(), scaled);
    evaluate_decision_tree(scaled_branches, fresh, *rig.bundle.actions, rig.engine.world(),
                           scaled);
    auto scaled_best = update_optimal_state(fresh, scaled_branches);
    REQUIRE(base.grounded);
    REQUIRE(scaled_best.grounded);
    CHECK(base.branch_index == scaled_best.branch_index);
}

TEST_CASE("zero-utility completeness: infeasible iff every branch failed") {
    DecisionRig rig;
    TableRow h1 = rig.engine.table().rows()[0];
    auto branches =
        generate_decision_tree(h1, *rig.bundle.actions, rig.engine.world(), rig.engine.roster());
    evaluate_decision_tree(branches, h1, *rig.bundle.actions, rig.engine.world(),
                           rig.engine.roster());
    bool any_positive = false;
    for (const DecisionBranch& b : branches) any_positive |= b.utility > 0;
    CHECK(update_optimal_state(h1, branches).grounded == any_positive);
}

TEST_CASE("find_next_action walks the grounded row in order") {
    DecisionRig rig;
    auto selection = rig.engine.select_and_ground();
    REQUIRE(selection.outcome == CooperationEngine::SelectOutcome::Grounded);
    const TableRow& row = rig.engine.row(selection.row);

    auto next = find_next_action(row);
    REQUIRE(next.has_value());
    CHECK(next->action == "d_pickup");

    TableRow copy = row;
    copy.done[0] = true;
    auto after = find_next_action(copy);
    REQUIRE(after.has_value());
    CHECK(after->action == "d_transport");
    CHECK(after->step == 1);

    std::fill(copy.done.begin(), copy.done.end(), true);
    CHECK_FALSE(find_next_action(copy).has_value());

    TableRow ungrounded = rig.engine.table().rows()[2];
    ungrounded.grounded = false;
    CHECK_THROWS_AS(find_next_action(ungrounded), NotGrounded);
}

TEST_CASE("robot failure abandons the row and reselection finds h3") {
    DecisionRig rig;
    auto selection = rig.engine.select_and_ground();
    REQUIRE(selection.outcome == CooperationEngine::SelectOutcome::Grounded);
    CHECK(rig.engine.row(selection.row).item == "h1");
    REQUIRE(rig.engine.dispatch_next().has_value());

    Event fail;
    fail.kind = Event::Kind::RobotAck;
    fail.ok = false;
    auto directives = rig.engine.handle_event(fail);
    REQUIRE(directives.size() == 1);
    CHECK(directives[0].kind == Directive::Kind::RowInfeasible);

    REQUIRE(rig.engine.query() == PhaseStatus::Suggestions);
    auto retry = rig.engine.select_and_ground();
    REQUIRE(retry.outcome == CooperationEngine::SelectOutcome::Grounded);
    CHECK(rig.engine.row(retry.row).item == "h3");
}

TEST_CASE("forcing every branch to fail reports the row, then h3 is chosen") {
    ScenarioBundle bundle = decision_fixture();
    // both robots refuse to transport anything
    AgentRoster roster = *bundle.agents;
    for (const std::string& id : {"R1", "R2"}) {
        AgentModel m = roster.get(id);
        m.failures.push_back({"d_transport", {}});
        roster.add(m);
    }
    HierGraph model = build_model(bundle);
    CooperationEngine engine(model, *bundle.actions, *bundle.world, roster);
    REQUIRE(engine.query() == PhaseStatus::Suggestions);
    engine.stage_met_states();
    REQUIRE(engine.query() == PhaseStatus::Suggestions);

    auto selection = engine.select_and_ground();
    CHECK(selection.outcome == CooperationEngine::SelectOutcome::RowInfeasible);
    CHECK(engine.row(selection.row).item == "h1");

    REQUIRE(engine.query() == PhaseStatus::Suggestions);
    auto retry = engine.select_and_ground();
    REQUIRE(retry.outcome == CooperationEngine::SelectOutcome::Grounded);
    CHECK(engine.row(retry.row).item == "h3");
}

TEST_CASE("a human action matching nothing feasible is recorded as stale") {
    DecisionRig rig;
    REQUIRE(rig.engine.select_and_ground().outcome ==
            CooperationEngine::SelectOutcome::Grounded);
    rig.engine.dispatch_next();
    Event ev;
    ev.kind = Event::Kind::HumanAction;
    ev.action = "dance";
    auto directives = rig.engine.handle_event(ev);
    REQUIRE(directives.size() == 1);
    CHECK(directives[0].kind == Directive::Kind::StaleEvent);
}

TEST_CASE("exhausting every row fails the cooperation") {
    DecisionRig rig;
    for (int i = 0; i < 3; ++i) {
        auto selection = rig.engine.select_and_ground();
        REQUIRE(selection.outcome == CooperationEngine::SelectOutcome::Grounded);
        rig.engine.dispatch_next();
        Event fail;
        fail.kind = Event::Kind::RobotAck;
        fail.ok = false;
        rig.engine.handle_event(fail);
        PhaseStatus status = rig.engine.query();
        if (i < 2) {
            REQUIRE(status == PhaseStatus::Suggestions);
        } else {
            CHECK(status == PhaseStatus::Failed);
        }
    }
}

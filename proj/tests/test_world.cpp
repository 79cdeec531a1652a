#include <doctest.h>

#include "coopgraph/bench.hpp"
#include "coopgraph/world.hpp"

using namespace coop;

namespace {

Literal L(const std::string& s) { return parse_literal(s); }

WorldState legs_world() {
    WorldState w;
    w.add_object("T", "Tabletop", {{0.0, 0.0, 0.0}});
    w.add_object("A", "Leg", {{1.0, 0.0, 0.0}});
    w.add_object("B", "Leg", {{0.0, 2.0, 0.0}});
    return w;
}

}  // namespace

TEST_CASE("query_groundings enumerates matching substitutions in order") {
    WorldState w = legs_world();
    auto legs = query_groundings(L("Leg(?y)"), w);
    REQUIRE(legs.size() == 2);
    CHECK(legs[0].lookup("y") == "A");
    CHECK(legs[1].lookup("y") == "B");

    auto tops = query_groundings(L("Tabletop(?x)"), w);
    REQUIRE(tops.size() == 1);
    CHECK(tops[0].lookup("x") == "T");

    CHECK(query_groundings(L("Screw(?s)"), w).empty());
}

TEST_CASE("apply_effects is plain set algebra with a precondition gate") {
    WorldState w = legs_world();
    w.add_fact(L("OnTable(A)"));

    State pre({L("OnTable(A)")});
    State add({L("Held(A)")});
    State del({L("OnTable(A)")});
    WorldState after = apply_effects(pre, add, del, w);
    CHECK(after.holds(L("Held(A)")));
    CHECK_FALSE(after.holds(L("OnTable(A)")));
    CHECK(after.holds(L("Leg(A)")));  // frame: untouched facts persist

    CHECK(apply_effects(State{}, State{}, State{}, w).facts() == w.facts());
    CHECK_THROWS_AS(apply_effects(State({L("OnTable(B)")}), add, del, w),
                    PreconditionViolation);
}

TEST_CASE("frame property over random effect applications") {
    SplitMix64 rng(8);
    const std::vector<std::string> preds{"P", "Q", "R"};
    const std::vector<std::string> consts{"a", "b", "c"};
    for (int iter = 0; iter < 200; ++iter) {
        WorldState w;
        std::vector<Literal> facts;
        for (int i = 0; i < 6; ++i) {
            Literal f;
            f.predicate = preds[rng.below(3)];
            f.args = {Term::constant(consts[rng.below(3)])};
            w.add_fact(f);
            facts.push_back(f);
        }
        State add({Literal{"Added", {Term::constant(consts[rng.below(3)])}, false}});
        Literal removed = facts[rng.below(facts.size())];
        State del({removed});
        WorldState after = apply_effects(State{}, add, del, w);
        for (const Literal& f : w.facts().literals()) {
            bool in_del = del.contains(f);
            CHECK(after.holds(f) == !in_del);
        }
        for (const Literal& f : add.literals()) CHECK(after.holds(f));
    }
}

TEST_CASE("check_consistency flags contradictions and absorbs news") {
    WorldState w = legs_world();
    w.add_fact(L("OnTable(A)"));

    SUBCASE("a percept equal to the facts is consistent") {
        auto before = w.facts();
        auto r = check_consistency({L("OnTable(A)"), L("Leg(A)")}, w);
        CHECK(r.consistent);
        CHECK(w.facts() == before);
    }
    SUBCASE("a negated percept of a stored fact is a conflict") {
        auto before = w.facts();
        auto r = check_consistency({L("!OnTable(A)")}, w);
        REQUIRE_FALSE(r.consistent);
        REQUIRE(r.conflicts.size() == 1);
        CHECK(r.conflicts[0] == L("OnTable(A)"));
        CHECK(w.facts() == before);  // untouched on inconsistency
    }
    SUBCASE("new objects extend the facts") {
        auto r = check_consistency({L("Leg(C)"), L("OnTable(C)")}, w);
        CHECK(r.consistent);
        CHECK(w.holds(L("OnTable(C)")));
    }
}

TEST_CASE("simulate_action: durations, failures and timeouts") {
    WorldState w = legs_world();
    w.add_fact(L("Held(B)"));

    AgentRoster roster;
    AgentModel r1{"R1", false, 30.0, {}, {}};
    r1.durations["transport"] = {0.2, 0.0};
    r1.durations["slow"] = {45.0, 0.0};
    r1.durations["haul"] = {0.1, 0.5};
    r1.failures.push_back({"jammed", {}});
    roster.add(r1);

    GroundedAction transport{"transport", {"B", "T"}, State({L("Held(B)")})};
    SUBCASE("base duration only") {
        auto out = simulate_action(transport, {"R1"}, w, roster);
        CHECK(out.success);
        CHECK(out.seconds == 0.2);
    }
    SUBCASE("declared failures fail") {
        GroundedAction jammed{"jammed", {"B"}, State{}};
        CHECK_FALSE(simulate_action(jammed, {"R1"}, w, roster).success);
    }
    SUBCASE("durations beyond the timeout fail") {
        GroundedAction slow{"slow", {}, State{}};
        CHECK_FALSE(simulate_action(slow, {"R1"}, w, roster).success);
    }
    SUBCASE("distance term uses the first two posed arguments") {
        GroundedAction haul{"haul", {"B", "T"}, State{}};
        auto out = simulate_action(haul, {"R1"}, w, roster);
        CHECK(out.success);
        CHECK(out.seconds == 1.1);  // 0.1 + 0.5 * 2m
    }
    SUBCASE("unmet preconditions fail with zero duration") {
        GroundedAction bad{"transport", {"A", "T"}, State({L("Held(A)")})};
        auto out = simulate_action(bad, {"R1"}, w, roster);
        CHECK_FALSE(out.success);
        CHECK(out.seconds == 0);
    }
    SUBCASE("unknown agents throw") {
        CHECK_THROWS_AS(simulate_action(transport, {"R9"}, w, roster), UnknownAgent);
    }
}

TEST_CASE("joint executions take the slowest participant") {
    WorldState w;
    AgentRoster roster;
    AgentModel a{"A1", false, 30.0, {{"lift", {1.0, 0.0}}}, {}};
    AgentModel b{"A2", false, 30.0, {{"lift", {2.5, 0.0}}}, {}};
    roster.add(a);
    roster.add(b);
    GroundedAction lift{"lift", {}, State{}};
    auto out = simulate_action(lift, {"A1", "A2"}, w, roster);
    CHECK(out.success);
    CHECK(out.seconds == 2.5);
}

TEST_CASE("failure patterns support positional wildcards") {
    WorldState w;
    AgentRoster roster;
    AgentModel m{"R1", false, 30.0, {{"move", {0.5, 0.0}}}, {}};
    m.failures.push_back({"move", {Term::constant("A"), Term::variable("_")}});
    roster.add(m);
    CHECK_FALSE(simulate_action({"move", {"A", "T"}, State{}}, {"R1"}, w, roster).success);
    CHECK(simulate_action({"move", {"B", "T"}, State{}}, {"R1"}, w, roster).success);
}

TEST_CASE("simulation outcomes are deterministic and millisecond-rounded") {
    WorldState w = legs_world();
    AgentRoster roster;
    AgentModel m{"R1", false, 30.0, {{"haul", {0.1, 0.3333}}}, {}};
    roster.add(m);
    GroundedAction haul{"haul", {"A", "T"}, State{}};
    auto a = simulate_action(haul, {"R1"}, w, roster);
    auto b = simulate_action(haul, {"R1"}, w, roster);
    CHECK(a.seconds == b.seconds);
    CHECK(a.seconds == round_to_milliseconds(a.seconds));
}

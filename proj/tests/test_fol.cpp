#include <doctest.h>

#include "coopgraph/bench.hpp"
#include "coopgraph/fol.hpp"

using namespace coop;

namespace {

Literal L(const std::string& text) { return parse_literal(text); }

}  // namespace

TEST_CASE("unify binds variables against grounded literals") {
    auto sigma = unify(L("Leg(?y)"), L("Leg(A)"));
    REQUIRE(sigma.has_value());
    CHECK(sigma->lookup("y") == "A");

    CHECK_FALSE(unify(L("Leg(?y)"), L("Tabletop(T)")).has_value());

    auto sigma2 = unify(L("Connected(?y,T)"), L("Connected(B,T)"));
    REQUIRE(sigma2.has_value());
    CHECK(apply_substitution(L("Connected(?y,T)"), *sigma2) == L("Connected(B,T)"));
}

TEST_CASE("unify rejects arity, negation and non-ground targets") {
    CHECK_FALSE(unify(L("P(?x)"), L("P(a,b)")).has_value());
    CHECK_FALSE(unify(L("P(?x)"), L("!P(a)")).has_value());
    CHECK_FALSE(unify(L("P(?x)"), L("P(?z)")).has_value());
    // repeated variable must bind consistently
    CHECK_FALSE(unify(L("P(?x,?x)"), L("P(a,b)")).has_value());
    CHECK(unify(L("P(?x,?x)"), L("P(a,a)")).has_value());
}

TEST_CASE("substitution application") {
    Substitution s;
    s.bind("y", "A");
    CHECK(apply_substitution(State({L("Leg(?y)")}), s) == State({L("Leg(A)")}));
    CHECK(apply_substitution(State({L("Leg(?y)")}), Substitution{}) == State({L("Leg(?y)")}));

    Substitution sb;
    sb.bind("y", "B");
    State st({L("Leg(?y)"), L("!AtPose(?y,MP)")});
    CHECK(apply_substitution(st, sb) == State({L("Leg(B)"), L("!AtPose(B,MP)")}));
}

TEST_CASE("groundedness") {
    CHECK(is_grounded(State({L("Leg(A)")})));
    CHECK_FALSE(is_grounded(State({L("Leg(?y)")})));
    CHECK(is_grounded(State{}));
}

TEST_CASE("a state rejects contradictory polarities") {
    CHECK_THROWS_AS(State({L("P(a)"), L("!P(a)")}), ModelError);
}

TEST_CASE("semantic equivalence under declared mappings") {
    State a({L("LegReady(?y)")});
    State b({L("LegReady(?y)")});
    std::vector<LiteralCorrespondence> identity{{L("LegReady(?y)"), {L("LegReady(?y)")}}};
    CHECK(semantically_equivalent(std::vector<State>{a}, std::vector<State>{b}, identity));

    // one upper literal standing for two lower ones
    State done({L("TableDone")});
    State lower({L("LegsFixed"), L("TopPlaced")});
    std::vector<LiteralCorrespondence> split{
        {L("TableDone"), {L("LegsFixed"), L("TopPlaced")}}};
    CHECK(semantically_equivalent(std::vector<State>{done}, std::vector<State>{lower}, split));

    // uncovered literals fail
    CHECK_FALSE(semantically_equivalent(std::vector<State>{State({L("X")})},
                                        std::vector<State>{State({L("Y")})}, {}));

    // mapping must reference literals that exist
    std::vector<LiteralCorrespondence> bogus{{L("Nope"), {L("Y")}}};
    CHECK_THROWS_AS(semantically_equivalent(std::vector<State>{State({L("X")})},
                                            std::vector<State>{State({L("Y")})}, bogus),
                    MalformedMapping);
}

TEST_CASE("semantic equivalence enforces a consistent renaming") {
    // same-name literals must agree on arity
    State a({L("P(x)")});
    State b({L("P(x,y)")});
    std::vector<LiteralCorrespondence> m{{L("P(x)"), {L("P(x,y)")}}};
    CHECK_FALSE(semantically_equivalent(std::vector<State>{a}, std::vector<State>{b}, m));

    // the same upper predicate may not map to two different lower shapes
    State a2({L("Q(u)"), L("Q(v)")});
    State b2({L("R1(u)"), L("R2(v)")});
    std::vector<LiteralCorrespondence> m2{{L("Q(u)"), {L("R1(u)")}},
                                          {L("Q(v)"), {L("R2(v)")}}};
    CHECK_FALSE(semantically_equivalent(std::vector<State>{a2}, std::vector<State>{b2}, m2));
}

TEST_CASE("unification round-trip and idempotence over random literals") {
    SplitMix64 rng(2024);
    const std::vector<std::string> preds{"P", "Q", "Longer_predicate"};
    const std::vector<std::string> constants{"a", "b", "c", "d"};
    for (int iter = 0; iter < 500; ++iter) {
        Literal ground;
        ground.predicate = preds[rng.below(preds.size())];
        ground.negated = rng.below(2) == 0;
        std::size_t arity = rng.below(4);
        for (std::size_t i = 0; i < arity; ++i) {
            ground.args.push_back(Term::constant(constants[rng.below(constants.size())]));
        }
        Literal pattern = ground;
        std::map<std::string, std::string> var_of_constant;
        for (Term& t : pattern.args) {
            if (rng.below(2) == 0) continue;
            auto [it, inserted] = var_of_constant.emplace(
                t.name, "v" + std::to_string(var_of_constant.size()));
            t = Term::variable(it->second);
        }
        auto sigma = unify(pattern, ground);
        REQUIRE(sigma.has_value());
        CHECK(apply_substitution(State({pattern}), *sigma) == State({ground}));

        State once = apply_substitution(State({pattern}), *sigma);
        CHECK(apply_substitution(once, *sigma) == once);
        CHECK(is_grounded(once));
    }
}

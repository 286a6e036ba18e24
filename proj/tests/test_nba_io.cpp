#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace rhcplan;
using testsupport::random_lasso;

TEST_CASE("one-state safety document imports") {
    nlohmann::json doc = {
        {"atoms", {"Obs"}},
        {"states", {0}},
        {"initial", {0}},
        {"accepting", {0}},
        {"transitions", {{{"from", 0}, {"to", 0}, {"labels", {nlohmann::json::array()}}}}},
    };
    Nba b = import_nba(doc);
    CHECK(b.num_states == 1);
    CHECK(b.initial == std::vector<std::uint32_t>{0});
    CHECK(b.accepting == std::vector<std::uint32_t>{0});
    // Self-loop only on the empty label: exactly the Obs-free behaviour.
    CHECK(nba_accepts_lasso(b, LassoWord{{}, {0}}));
    CHECK_FALSE(nba_accepts_lasso(b, LassoWord{{}, {1}}));
}

TEST_CASE("empty accepting set is a valid empty-language automaton") {
    nlohmann::json doc = {
        {"atoms", {"a"}},
        {"states", {0, 1}},
        {"initial", {0}},
        {"accepting", nlohmann::json::array()},
        {"transitions",
         {{{"from", 0}, {"to", 1}, {"labels", {{"a"}}}},
          {{"from", 1}, {"to", 1}, {"labels", {{"a"}, nlohmann::json::array()}}}}},
    };
    Nba b = import_nba(doc);
    std::mt19937 rng(11);
    for (int i = 0; i < 25; ++i)
        CHECK_FALSE(nba_accepts_lasso(b, random_lasso(rng, 1, 3, 3)));
}

TEST_CASE("schema violations carry a field path") {
    nlohmann::json doc = {{"atoms", {"a"}}, {"states", {0}}};
    CHECK_THROWS_AS(import_nba(doc), schema_error);
    nlohmann::json dangling = {
        {"atoms", {"a"}},
        {"states", {0}},
        {"initial", {0}},
        {"accepting", {3}},
        {"transitions", nlohmann::json::array()},
    };
    CHECK_THROWS_WITH(import_nba(dangling), Catch::Matchers::ContainsSubstring("accepting"));
    nlohmann::json dup = dangling;
    dup["states"] = {0, 0};
    CHECK_THROWS_AS(import_nba(dup), schema_error);
}

TEST_CASE("export then import preserves acceptance") {
    AtomSet atoms({"a", "b"});
    auto f = parse_ltl("[] <> a", atoms);
    Nba b = translate_to_nba(f, atoms);
    Nba b2 = import_nba(export_nba(b));
    CHECK(b2.num_states == b.num_states);
    std::mt19937 rng(21);
    for (int i = 0; i < 80; ++i) {
        auto w = random_lasso(rng, 2, 4, 4);
        CHECK(nba_accepts_lasso(b, w) == nba_accepts_lasso(b2, w));
    }
}

TEST_CASE("round-trip across random translated automata") {
    AtomSet atoms({"a", "b", "c"});
    std::mt19937 rng(31);
    for (int i = 0; i < 10; ++i) {
        auto f = testsupport::random_formula(rng, 3, 3);
        Nba b = translate_to_nba(f, atoms);
        Nba b2 = import_nba(export_nba(b));
        for (int wi = 0; wi < 30; ++wi) {
            auto w = random_lasso(rng, 3, 4, 4);
            REQUIRE(nba_accepts_lasso(b, w) == nba_accepts_lasso(b2, w));
        }
    }
}

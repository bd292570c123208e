#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bidding/distribution.hpp"
#include "bidding/game.hpp"
#include "test_support.hpp"

using namespace bidding;

namespace {

const char* kBowtieJson = R"({
  "objective": "mean-payoff",
  "vertices": [{"id": "L", "weight": 1}, {"id": "R", "weight": 0}],
  "edges": [["L", "L"], ["L", "R"], ["R", "L"], ["R", "R"]]
})";

} // namespace

TEST_CASE("bowtie JSON parses to two vertices and four edges") {
    GameGraph game = parse_game(kBowtieJson);
    CHECK(game.vertex_count() == 2);
    CHECK(game.edges().size() == 4);
    CHECK(game.weight(0) == Rational(1));
    CHECK(game.weight(1) == Rational(0));
    CHECK(game.strongly_connected());
}

TEST_CASE("single self-loop vertex is a valid mean-payoff game") {
    GameGraph game = parse_game(R"({"objective": "mean-payoff",
        "vertices": [{"id": "v", "weight": 0}], "edges": [["v", "v"]]})");
    CHECK(game.vertex_count() == 1);
}

TEST_CASE("degenerate graphs are rejected") {
    // v has no successor and the graph is not strongly connected
    CHECK_THROWS_AS(parse_game(R"({"objective": "mean-payoff",
        "vertices": [{"id": "u", "weight": 0}, {"id": "v", "weight": 0}],
        "edges": [["u", "v"]]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_game(R"({"objective": "mean-payoff",
        "vertices": [{"id": "u", "weight": 0}, {"id": "v", "weight": 0}],
        "edges": [["u", "v"], ["v", "v"]]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_game("not json"), ValidationError);
    CHECK_THROWS_AS(parse_game(R"({"objective": "mean-payoff",
        "vertices": [{"id": "u", "weight": 0}], "edges": [["u", "w"]]})"),
                    ValidationError);
    // reachability without a target
    CHECK_THROWS_AS(parse_game(R"({"objective": "reachability",
        "vertices": [{"id": "u", "weight": 0}], "edges": [["u", "u"]]})"),
                    ValidationError);
    // duplicate ids and duplicate edges
    CHECK_THROWS_AS(parse_game(R"({"objective": "mean-payoff",
        "vertices": [{"id": "u", "weight": 0}, {"id": "u", "weight": 1}],
        "edges": [["u", "u"]]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_game(R"({"objective": "mean-payoff",
        "vertices": [{"id": "u", "weight": 0}],
        "edges": [["u", "u"], ["u", "u"]]})"),
                    ValidationError);
}

TEST_CASE("string rational weights parse exactly") {
    GameGraph game = parse_game(R"({"objective": "mean-payoff",
        "vertices": [{"id": "v", "weight": "1/3"}], "edges": [["v", "v"]]})");
    CHECK(game.weight(0) == Rational(1, 3));
}

TEST_CASE("serialize then parse is the identity on validated games") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        GameGraph game = testing::random_strongly_connected_game(rng, 2 + int(rng() % 5));
        GameGraph back = parse_game(serialize(game));
        REQUIRE(back.vertex_count() == game.vertex_count());
        for (int v = 0; v < game.vertex_count(); ++v) {
            CHECK(back.id(v) == game.id(v));
            CHECK(back.weight(v) == game.weight(v));
        }
        CHECK(back.edges() == game.edges());
    }

    GameGraph fractional = parse_game(R"({"objective": "mean-payoff",
        "vertices": [{"id": "v", "weight": "5/12"}], "edges": [["v", "v"]]})");
    CHECK(parse_game(serialize(fractional)).weight(0) == Rational(5, 12));
}

TEST_CASE("strong connectivity agrees with the naive reachability check") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> size(1, 8);
    for (int trial = 0; trial < 300; ++trial) {
        int n = size(rng);
        std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
        std::uniform_int_distribution<int> pick(0, n - 1);
        int edges = 1 + int(rng() % unsigned(2 * n));
        for (int e = 0; e < edges; ++e) {
            int u = pick(rng);
            int v = pick(rng);
            if (std::find(succ[size_t(u)].begin(), succ[size_t(u)].end(), v) ==
                succ[size_t(u)].end()) {
                succ[size_t(u)].push_back(v);
            }
        }
        CHECK(is_strongly_connected(succ) == testing::naive_strongly_connected(succ));
    }
}

TEST_CASE("distribution atoms sort and validate") {
    auto dist = BudgetDistribution::make({{Rational(2), Rational(1, 2)}, {Rational(1), Rational(1, 2)}});
    CHECK(dist.size() == 2);
    CHECK(dist.budget(0) == Rational(1));
    CHECK(dist.budget(1) == Rational(2));

    auto single = BudgetDistribution::point(Rational(5));
    CHECK(single.size() == 1);
    CHECK(single.probability(0) == Rational(1));

    CHECK_THROWS_AS(
        BudgetDistribution::make({{Rational(1), Rational(1, 2)}, {Rational(1), Rational(1, 2)}}),
        ValidationError);
    CHECK_THROWS_AS(BudgetDistribution::make({{Rational(1), Rational(1, 2)}}), ValidationError);
    CHECK_THROWS_AS(
        BudgetDistribution::make({{Rational(1), Rational(3, 4)}, {Rational(2), Rational(3, 4)}}),
        ValidationError);
    CHECK_THROWS_AS(BudgetDistribution::make({{Rational(1), Rational(0)}, {Rational(2), Rational(1)}}),
                    ValidationError);
    CHECK_THROWS_AS(BudgetDistribution::make({{Rational(-1), Rational(1)}}), ValidationError);
}

TEST_CASE("distribution output is increasing regardless of input order") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + int(rng() % 5);
        std::vector<Rational> budgets;
        for (int i = 0; i < n; ++i) budgets.emplace_back(Rational(3LL * i + trial % 2, 1 + trial % 3));
        std::shuffle(budgets.begin(), budgets.end(), rng);
        auto dist = BudgetDistribution::uniform(budgets);
        for (int i = 1; i < dist.size(); ++i) CHECK(dist.budget(i - 1) < dist.budget(i));
    }
}

TEST_CASE("distribution JSON round trip and shorthand parsing") {
    auto dist = parse_distribution(R"({"atoms": [[1, "1/2"], [2, 0.5]]})");
    CHECK(dist.size() == 2);
    CHECK(dist.probability(0) == Rational(1, 2));
    auto back = parse_distribution(serialize(dist));
    CHECK(back.budget(1) == Rational(2));

    auto uniform = parse_distribution_spec("uniform:1,2");
    CHECK(uniform.size() == 2);
    CHECK(uniform.probability(0) == Rational(1, 2));
    auto point = parse_distribution_spec("point:0.2");
    CHECK(point.budget(0) == Rational(1, 5));
    CHECK_THROWS_AS(parse_distribution_spec("/nonexistent/path.json"), ValidationError);
}

TEST_CASE("budget ratio") {
    CHECK(Ratio::of(Rational(1), Rational(2)).value == Rational(1, 3));
    CHECK(Ratio::of(Rational(0), Rational(2)).value == Rational(0));
    CHECK_THROWS_AS(Ratio::of(Rational(0), Rational(0)), ValidationError);
    CHECK_THROWS_AS(Ratio::of(Rational(-1), Rational(1)), ValidationError);
}

TEST_CASE("mechanism names") {
    CHECK(parse_mechanism("first-price-poorman") ==
          Mechanism{PriceRule::FirstPrice, RecipientRule::Poorman});
    CHECK(parse_mechanism("ALL_PAY_RICHMAN") == Mechanism{PriceRule::AllPay, RecipientRule::Richman});
    CHECK(to_string(Mechanism{PriceRule::AllPay, RecipientRule::Poorman}) == "all-pay-poorman");
    CHECK_THROWS_AS(parse_mechanism("second-price"), ValidationError);
}

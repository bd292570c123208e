#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "bidding/oracle.hpp"
#include "bidding/simulate.hpp"
#include "test_support.hpp"

using namespace bidding;
namespace bt = bidding::testing;

namespace {

const Mechanism kFpPoorman{PriceRule::FirstPrice, RecipientRule::Poorman};
const Mechanism kApPoorman{PriceRule::AllPay, RecipientRule::Poorman};
const Mechanism kFpRichman{PriceRule::FirstPrice, RecipientRule::Richman};
const Mechanism kApRichman{PriceRule::AllPay, RecipientRule::Richman};

Strategy constant_bid(double bid, Player side) {
    Strategy s;
    s.act = [bid, side](const PlayView& view, Player) -> BidAction {
        int at = view.current_vertex();
        auto succ = view.game->successors(at);
        int move = succ[0];
        for (int u : succ) {
            bool better = side == Player::Max
                              ? view.game->weight_value(u) > view.game->weight_value(move)
                              : view.game->weight_value(u) < view.game->weight_value(move);
            if (better) move = u;
        }
        return {std::min(bid, view.available(side)), move};
    };
    return s;
}

Strategy scripted_bids(std::vector<double> bids, Player side) {
    Strategy s;
    s.act = [bids = std::move(bids), side](const PlayView& view, Player) -> BidAction {
        std::size_t round = view.rounds.size();
        double bid = round < bids.size() ? bids[round] : 0.0;
        int at = view.current_vertex();
        auto succ = view.game->successors(at);
        int move = succ[0];
        for (int u : succ) {
            bool better = side == Player::Max
                              ? view.game->weight_value(u) > view.game->weight_value(move)
                              : view.game->weight_value(u) < view.game->weight_value(move);
            if (better) move = u;
        }
        return {bid, move};
    };
    return s;
}

Strategy random_legal(unsigned seed) {
    auto rng = std::make_shared<std::mt19937>(seed);
    Strategy s;
    s.act = [rng](const PlayView& view, Player self) -> BidAction {
        double avail = std::max(0.0, view.available(self));
        std::uniform_real_distribution<double> bid(0.0, avail);
        auto succ = view.game->successors(view.current_vertex());
        std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
        return {bid(*rng), succ[pick(*rng)]};
    };
    return s;
}

// replay check: budgets derived from the transcript must match the
// mechanism's accounting identities at every prefix
void check_budget_conservation(const PlayRecord& rec) {
    double total0 = rec.budget_max0 + rec.budget_min0;
    for (std::size_t k = 0; k <= rec.rounds.size(); ++k) {
        auto [bmax, bmin] = budgets_after(rec, k);
        CHECK(bmax >= -1e-12);
        CHECK(bmin >= -1e-12);
        if (rec.mech.recipient == RecipientRule::Richman) {
            CHECK(bmax + bmin == total0); // exact at lattice granularity
        } else if (k > 0) {
            auto [pmax, pmin] = budgets_after(rec, k - 1);
            const auto& r = rec.rounds[k - 1];
            double spent = rec.mech.price == PriceRule::AllPay
                               ? r.bid_max + r.bid_min
                               : (r.winner == Player::Max ? r.bid_max : r.bid_min);
            CHECK((pmax + pmin) - (bmax + bmin) == spent);
        }
    }
}

} // namespace

TEST_CASE("ties go to Min: zero bids hand her every round") {
    GameGraph bowtie = bowtie_game();
    auto rec = run_play(bowtie, constant_bid(0.0, Player::Max), constant_bid(0.0, Player::Min), 1.0,
                        1.0, kFpPoorman, 50);
    for (const auto& r : rec.rounds) {
        CHECK(r.winner == Player::Min);
        CHECK(bowtie.id(r.vertex) == "R");
    }
    CHECK(mean_payoff_estimate(bowtie, rec, 1.0).trailing == doctest::Approx(0.0));
}

TEST_CASE("first-price Richman pays the winning bid to the opponent") {
    GameGraph bowtie = bowtie_game();
    auto rec = run_play(bowtie, scripted_bids({0.25}, Player::Max),
                        scripted_bids({0.0}, Player::Min), 1.0, 1.0, kFpRichman, 1);
    REQUIRE(rec.rounds.size() == 1);
    CHECK(rec.rounds[0].winner == Player::Max);
    auto [bmax, bmin] = budgets_after(rec, 1);
    CHECK(bmax == doctest::Approx(0.75));
    CHECK(bmin == doctest::Approx(1.25));
}

TEST_CASE("all-pay poorman deducts both bids") {
    GameGraph bowtie = bowtie_game();
    auto rec = run_play(bowtie, scripted_bids({0.25}, Player::Max),
                        scripted_bids({0.125}, Player::Min), 1.0, 1.0, kApPoorman, 1);
    auto [bmax, bmin] = budgets_after(rec, 1);
    CHECK(bmax == doctest::Approx(0.75));
    CHECK(bmin == doctest::Approx(0.875));
    CHECK(rec.rounds[0].winner == Player::Max);
}

TEST_CASE("all-pay Richman pays both bids across") {
    GameGraph bowtie = bowtie_game();
    auto rec = run_play(bowtie, scripted_bids({0.25}, Player::Max),
                        scripted_bids({0.125}, Player::Min), 1.0, 1.0, kApRichman, 1);
    auto [bmax, bmin] = budgets_after(rec, 1);
    CHECK(bmax == doctest::Approx(1.0 - 0.25 + 0.125));
    CHECK(bmin == doctest::Approx(1.0 - 0.125 + 0.25));
}

TEST_CASE("budget conservation replay on random plays, all four mechanisms") {
    GameGraph bowtie = bowtie_game();
    unsigned seed = 100;
    for (Mechanism mech : {kFpPoorman, kApPoorman, kFpRichman, kApRichman}) {
        for (int play = 0; play < 50; ++play) {
            auto rec = run_play(bowtie, random_legal(seed), random_legal(seed + 1), 1.0, 2.0, mech,
                                25);
            check_budget_conservation(rec);
            seed += 2;
        }
    }
}

TEST_CASE("payoff estimator") {
    GameGraph bowtie = bowtie_game();

    // alternating weights 1,0,1,0,...
    std::vector<double> max_bids, min_bids;
    for (int i = 0; i < 40; ++i) {
        max_bids.push_back(i % 2 == 0 ? 0.01 : 0.0);
        min_bids.push_back(0.0);
    }
    auto rec = run_play(bowtie, scripted_bids(max_bids, Player::Max),
                        scripted_bids(min_bids, Player::Min), 1.0, 1.0, kFpPoorman, 40, 0.0);
    auto est = mean_payoff_estimate(bowtie, rec, 1.0);
    CHECK(est.trailing == doctest::Approx(0.5));
    CHECK(est.full == doctest::Approx(0.5));

    // Max wins a known fraction q of the rounds
    int wins = 0;
    for (const auto& r : rec.rounds) wins += r.winner == Player::Max ? 1 : 0;
    CHECK(est.full == doctest::Approx(double(wins) / double(rec.rounds.size())));

    GameGraph constant = bt::cycle_game({7});
    auto const_rec = run_play(constant, constant_bid(0.0, Player::Max),
                              constant_bid(0.0, Player::Min), 1.0, 1.0, kFpPoorman, 10);
    CHECK(mean_payoff_estimate(constant, const_rec, 0.5).trailing == doctest::Approx(7.0));

    CHECK_THROWS_AS(mean_payoff_estimate(bowtie, PlayRecord{}, 0.5), ValidationError);
    CHECK_THROWS_AS(mean_payoff_estimate(bowtie, rec, 0.0), ValidationError);
    CHECK_THROWS_AS(mean_payoff_estimate(bowtie, rec, 1.5), ValidationError);
}

TEST_CASE("illegal actions abort naming the offender and round") {
    GameGraph bowtie = bowtie_game();
    auto overbid = scripted_bids({2.0}, Player::Max);
    CHECK_THROWS_WITH_AS(run_play(bowtie, overbid, constant_bid(0.0, Player::Min), 1.0, 1.0,
                                  kFpPoorman, 1),
                         doctest::Contains("Max emitted an illegal bid"), ValidationError);

    Strategy bad_move;
    bad_move.act = [](const PlayView&, Player) -> BidAction { return {0.0, 99}; };
    CHECK_THROWS_WITH_AS(run_play(bowtie, constant_bid(0.0, Player::Max), bad_move, 1.0, 1.0,
                                  kFpPoorman, 1),
                         doctest::Contains("Min chose an illegal successor"), ValidationError);
}

TEST_CASE("raising Min's bid never turns her win into a loss") {
    GameGraph bowtie = bowtie_game();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> bid(0.0, 0.5);
    for (int trial = 0; trial < 200; ++trial) {
        double bmax = bid(rng);
        double bmin = bid(rng);
        double eta = bid(rng) * 0.1 + 1.0 / 1024.0;
        auto rec1 = run_play(bowtie, scripted_bids({bmax}, Player::Max),
                             scripted_bids({bmin}, Player::Min), 1.0, 1.0, kFpPoorman, 1);
        auto rec2 = run_play(bowtie, scripted_bids({bmax}, Player::Max),
                             scripted_bids({bmin + eta}, Player::Min), 1.0, 1.0, kFpPoorman, 1);
        if (rec1.rounds[0].winner == Player::Min) {
            CHECK(rec2.rounds[0].winner == Player::Min);
        }
    }
}

TEST_CASE("identical strategies and horizon replay bit-identically") {
    GameGraph bowtie = bowtie_game();
    auto rec1 = run_play(bowtie, random_legal(7), random_legal(8), 1.0, 2.0, kFpPoorman, 100);
    auto rec2 = run_play(bowtie, random_legal(7), random_legal(8), 1.0, 2.0, kFpPoorman, 100);
    REQUIRE(rec1.rounds.size() == rec2.rounds.size());
    for (std::size_t i = 0; i < rec1.rounds.size(); ++i) {
        CHECK(rec1.rounds[i].bid_max == rec2.rounds[i].bid_max);
        CHECK(rec1.rounds[i].bid_min == rec2.rounds[i].bid_min);
        CHECK(rec1.rounds[i].winner == rec2.rounds[i].winner);
        CHECK(rec1.rounds[i].vertex == rec2.rounds[i].vertex);
    }
}

TEST_CASE("wallet strategy with a single wallet matches its subpolicy") {
    GameGraph bowtie = bowtie_game();
    auto gamma = BudgetDistribution::point(Rational(1));
    auto sub = constant_bid(8.0 / 1024.0, Player::Max);
    auto wallet = make_wallet_strategy(bowtie, {1.0}, {sub}, gamma, kFpPoorman);

    auto rec_wallet = run_play(bowtie, wallet, constant_bid(0.0, Player::Min), 1.0, 1.0,
                               kFpPoorman, 30);
    auto rec_sub = run_play(bowtie, sub, constant_bid(0.0, Player::Min), 1.0, 1.0, kFpPoorman, 30);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(rec_wallet.rounds[i].bid_max == rec_sub.rounds[i].bid_max);
        CHECK(rec_wallet.rounds[i].vertex == rec_sub.rounds[i].vertex);
    }
}

TEST_CASE("wallet strategy switches when Min's investment exceeds the first support") {
    GameGraph bowtie = bowtie_game();
    auto gamma = BudgetDistribution::uniform({Rational(1), Rational(2)});
    double marker0 = 8.0 / 1024.0;
    double marker1 = 16.0 / 1024.0;
    auto wallet = make_wallet_strategy(bowtie, {0.5, 1.0},
                                       {constant_bid(marker0, Player::Max),
                                        constant_bid(marker1, Player::Max)},
                                       gamma, kFpPoorman);

    // Min wins her scripted bids, crossing investment 1 after round 3
    std::vector<double> min_bids{0.3125, 0.3125, 0.3125, 0.3125, 0.0, 0.0, 0.0};
    auto rec = run_play(bowtie, wallet, scripted_bids(min_bids, Player::Min), 1.0, 2.0, kFpPoorman,
                        7);
    // cumulative Min investment: .3125, .625, .9375, 1.25 -> switch after round 3
    for (int i = 0; i < 4; ++i) CHECK(rec.rounds[size_t(i)].bid_max == doctest::Approx(marker0));
    for (int i = 4; i < 7; ++i) CHECK(rec.rounds[size_t(i)].bid_max == doctest::Approx(marker1));
}

TEST_CASE("second wallet stays untouched while Min stays under the first support") {
    GameGraph bowtie = bowtie_game();
    auto gamma = BudgetDistribution::uniform({Rational(1), Rational(2)});
    double marker1 = 64.0 / 1024.0;
    auto wallet = make_wallet_strategy(bowtie, {0.5, 1.0},
                                       {constant_bid(8.0 / 1024.0, Player::Max),
                                        constant_bid(marker1, Player::Max)},
                                       gamma, kFpPoorman);
    std::vector<double> min_bids(40, 0.0156250); // total 0.625 if she won all, but
    min_bids.resize(40, 0.0);                    // she only wins while outbidding
    auto rec = run_play(bowtie, wallet, scripted_bids(min_bids, Player::Min), 1.0, 2.0, kFpPoorman,
                        40);
    double max_inv = 0.0;
    for (const auto& r : rec.rounds) {
        CHECK(r.bid_max != doctest::Approx(marker1));
        if (r.winner == Player::Max) max_inv += r.bid_max;
    }
    CHECK(max_inv <= 0.5 + 1e-9);
}

TEST_CASE("wallet subpolicy overdrawing its wallet is an error") {
    GameGraph bowtie = bowtie_game();
    auto gamma = BudgetDistribution::point(Rational(1));
    Strategy greedy;
    greedy.act = [](const PlayView&, Player) -> BidAction { return {0.75, 0}; };
    auto wallet = make_wallet_strategy(bowtie, {0.5}, {greedy}, gamma, kFpPoorman);
    CHECK_THROWS_WITH_AS(run_play(bowtie, wallet, constant_bid(0.0, Player::Min), 1.0, 1.0,
                                  kFpPoorman, 1),
                         doctest::Contains("above its wallet"), ValidationError);

    CHECK_THROWS_AS(make_wallet_strategy(bowtie, {0.5}, {greedy}, gamma, kFpRichman),
                    ValidationError);
}

TEST_CASE("expected payoff over singleton supports is the single-play payoff") {
    GameGraph bowtie = bowtie_game();
    auto beta = BudgetDistribution::point(Rational(1));
    auto gamma = BudgetDistribution::point(Rational(1));
    auto f = constant_bid(8.0 / 1024.0, Player::Max);
    auto g = constant_bid(0.0, Player::Min);
    double expectation = expected_payoff(bowtie, {f}, {g}, beta, gamma, kFpPoorman, 200, 0.5);
    auto rec = run_play(bowtie, f, g, 1.0, 1.0, kFpPoorman, 200);
    CHECK(expectation == doctest::Approx(mean_payoff_estimate(bowtie, rec, 0.5).trailing));

    CHECK_THROWS_AS(expected_payoff(bowtie, {}, {g}, beta, gamma, kFpPoorman, 10, 0.5),
                    ValidationError);
}

TEST_CASE("naive Min family defends close to the fully-informed optimum") {
    GameGraph bowtie = bowtie_game();
    auto min_c1 = discrete_minimax(bowtie, kFpPoorman, 20, 20, 40, Player::Min);
    auto min_c2 = discrete_minimax(bowtie, kFpPoorman, 20, 40, 40, Player::Min);
    StrategyFamily naive{naive_fully_informed_min(bowtie, 1.0, 1.0, min_c1.committed_policy),
                         naive_fully_informed_min(bowtie, 2.0, 1.0, min_c2.committed_policy)};

    auto full_c1 = discrete_minimax(bowtie, kFpPoorman, 20, 20, 40, Player::Max);
    auto full_c2 = discrete_minimax(bowtie, kFpPoorman, 20, 40, 40, Player::Max);
    // a Max who somehow knows Min's draw: stronger than any legal family,
    // so a bound against him covers every legal family too
    StrategyFamily clairvoyant{
        make_table_strategy(bowtie, full_c1.committed_policy, Player::Max, 1.0, 1.0),
        make_table_strategy(bowtie, full_c2.committed_policy, Player::Max, 1.0, 2.0)};

    auto rec1 = run_play(bowtie, clairvoyant[0], naive[0], 1.0, 1.0, kFpPoorman, 10'000, 0.0);
    auto rec2 = run_play(bowtie, clairvoyant[1], naive[1], 1.0, 2.0, kFpPoorman, 10'000, 0.0);
    double value = 0.5 * mean_payoff_estimate(bowtie, rec1, 0.5).trailing +
                   0.5 * mean_payoff_estimate(bowtie, rec2, 0.5).trailing;
    CHECK(value <= 5.0 / 12.0 + 0.05);
    CHECK(value >= 5.0 / 12.0 - 0.1); // and he is not far below it either
}

TEST_CASE("Richman table strategies play legally with transfers") {
    GameGraph bowtie = bowtie_game();
    auto max_oracle = discrete_minimax(bowtie, kFpRichman, 10, 10, 20, Player::Max);
    auto min_oracle = discrete_minimax(bowtie, kFpRichman, 10, 10, 20, Player::Min);
    Strategy f = make_table_strategy(bowtie, max_oracle.committed_policy, Player::Max, 1.0, 1.0);
    Strategy g = make_table_strategy(bowtie, min_oracle.committed_policy, Player::Min, 1.0, 1.0);

    auto rec = run_play(bowtie, f, g, 1.0, 1.0, kFpRichman, 500, 0.0);
    check_budget_conservation(rec);
    auto est = mean_payoff_estimate(bowtie, rec, 0.5);
    CHECK(est.trailing >= 0.0);
    CHECK(est.trailing <= 1.0);
    // equal Richman budgets on the bowtie stay near an even split
    CHECK(std::abs(est.trailing - 0.5) <= 0.25);

    auto rec_ap = run_play(bowtie, f, g, 1.0, 1.0, kApRichman, 200, 0.0);
    check_budget_conservation(rec_ap);
}

TEST_CASE("CSV transcript carries budgets per round") {
    GameGraph bowtie = bowtie_game();
    auto rec = run_play(bowtie, scripted_bids({0.25, 0.125}, Player::Max),
                        scripted_bids({0.0, 0.0}, Player::Min), 1.0, 1.0, kFpPoorman, 2);
    std::string csv = to_csv(rec, bowtie);
    CHECK(csv.find("round,bid_max,bid_min,winner,vertex,budget_max,budget_min") == 0);
    CHECK(csv.find("Max") != std::string::npos);
    CHECK(csv.find("0.75") != std::string::npos);
}

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bidding/distribution.hpp"
#include "bidding/game.hpp"
#include "bidding/table_policy.hpp"

namespace bidding {

/// Default bid lattice: snapping bids to multiples of 1/1024 keeps budget
/// accounting exact in binary floating point, so plays replay bit-identically.
/// Pass granularity 0 to run_play for unquantized bids; long-horizon
/// mean-payoff play needs them, since any fixed lattice eventually forces the
/// shrinking optimal bids to zero.
inline constexpr double kDefaultBidGranularity = 1.0 / 1024.0;

struct PlayRound {
    double bid_max = 0.0;
    double bid_min = 0.0;
    Player winner = Player::Min;
    int vertex = 0; // token position after the round
};

/// What a strategy sees: the rounds played so far plus the initial budgets
/// in effect at the start of the visible window. Wallet strategies hand
/// their subpolicies a suffix view with virtual budgets.
struct PlayView {
    const GameGraph* game = nullptr;
    Mechanism mech;
    int start_vertex = 0;
    double budget_max0 = 0.0;
    double budget_min0 = 0.0;
    std::span<const PlayRound> rounds;

    int current_vertex() const { return rounds.empty() ? start_vertex : rounds.back().vertex; }
    /// Sum of winning bids (first-price) or of all bids (all-pay).
    double investment(Player p) const;
    /// Budget still available under the view's mechanism accounting.
    double available(Player p) const;
    double available_with_initial(Player p, double initial) const;
};

struct BidAction {
    double bid = 0.0;
    int move_to = 0;
};

/// Deterministic map from an observed play prefix to the next action.
struct Strategy {
    double declared_budget = 0.0;
    std::function<BidAction(const PlayView&, Player self)> act;
};

/// Full transcript of one play, with enough context to reconstruct budgets
/// at every prefix.
struct PlayRecord {
    Mechanism mech;
    int initial_vertex = 0;
    double budget_max0 = 0.0;
    double budget_min0 = 0.0;
    double granularity = kDefaultBidGranularity;
    std::vector<PlayRound> rounds;

    PlayView view(const GameGraph& game) const {
        return {&game, mech, initial_vertex, budget_max0, budget_min0, rounds};
    }
};

/// Budgets remaining after the first `round_count` rounds.
std::pair<double, double> budgets_after(const PlayRecord& record, std::size_t round_count);

/// Plays `horizon` rounds. Ties go to Min. An illegal bid or move aborts
/// with an error naming the offender and the round.
PlayRecord run_play(const GameGraph& game, const Strategy& max_strategy,
                    const Strategy& min_strategy, double budget_max, double budget_min,
                    Mechanism mech, int horizon, double granularity = kDefaultBidGranularity);

struct PayoffEstimate {
    double trailing = 0.0; // average weight over the trailing window
    double full = 0.0;     // average weight over the whole play
};

/// Finite-horizon stand-in for the long-run average. The trailing window
/// discards the opening transient; the full average is reported alongside.
PayoffEstimate mean_payoff_estimate(const GameGraph& game, const PlayRecord& record, double window);

/// Strategy driven by an oracle policy table. Under poorman rules budgets
/// shrink geometrically, so the state is rescaled every round (own side at
/// its nominal unit count) and bids shrink with the budget; under Richman
/// rules the pot is conserved, so units keep a fixed absolute size and the
/// state sits on the constant-total diagonal.
///
/// min_stake_units floors the emitted bid. A zero table bid means "the
/// opponent cannot afford to outbid profitably", which holds at integer
/// units but not under divisible bids; the default floor of one unit keeps
/// that reasoning sound and costs at most one unit per won round.
Strategy make_table_strategy(const GameGraph& game, TablePolicy table, Player side,
                             double own_initial, double opponent_initial_belief,
                             int min_stake_units = 1);

/// Min reveals her true budget from round one: the full-information policy
/// for (budget_max, budget_min) drives her play.
Strategy naive_fully_informed_min(const GameGraph& game, double budget_min, double budget_max,
                                  const TablePolicy& table);

/// Composes per-wallet subpolicies: wallet i plays until Min's observed
/// investment exceeds the i-th support budget, then the next wallet takes
/// over against Min's residual budget.
Strategy make_wallet_strategy(const GameGraph& game, std::vector<double> xs,
                              std::vector<Strategy> subpolicies, const BudgetDistribution& gamma,
                              Mechanism mech);

using StrategyFamily = std::vector<Strategy>; // aligned with distribution atoms

/// Expectation of the trailing-average payoff over both budget draws.
double expected_payoff(const GameGraph& game, const StrategyFamily& max_family,
                       const StrategyFamily& min_family, const BudgetDistribution& beta,
                       const BudgetDistribution& gamma, Mechanism mech, int horizon, double window,
                       double granularity = kDefaultBidGranularity);

/// Transcript as CSV: round, bid_max, bid_min, winner, vertex, budget_max, budget_min.
std::string to_csv(const PlayRecord& record, const GameGraph& game);

} // namespace bidding

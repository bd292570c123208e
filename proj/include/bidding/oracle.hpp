#pragma once

#include <vector>

#include "bidding/game.hpp"
#include "bidding/table_policy.hpp"

namespace bidding {

struct OracleLimits {
    int units_cap = 64;
    int horizon_cap = 64;
    int vertex_cap = 6;
    long state_cap = 5'000'000;
};

/// Backward-induction tables for the discretized bidding game.
///
/// The committed side reveals its (bid, move) pair and the opponent best
/// responds round by round, matching the guarantee semantics of the
/// continuous game: commit Max for the payoff he can secure, Min for the
/// payoff she can cap. Ties go to Min at every granularity.
struct OracleResult {
    Player committed = Player::Max;
    Mechanism mech;
    int units_max0 = 0;
    int units_min0 = 0;
    int horizon = 0;
    int vertex_count = 0;
    std::vector<double> totals; // optimal total remaining reward, layered like TablePolicy::index
    TablePolicy committed_policy;
    TablePolicy responder_policy;

    double total_at(const DiscreteState& s) const;
    double average_at(const DiscreteState& s) const; // total / rounds_remaining
    double value_at_full(int start_vertex = 0) const;
};

OracleResult discrete_minimax(const GameGraph& game, Mechanism mech, int units_max, int units_min,
                              int horizon, Player committed = Player::Max,
                              const OracleLimits& limits = {});

struct BestResponse {
    double value = 0.0; // responder-optimal average at vertex 0, full budgets, full horizon
    TablePolicy policy;
    std::vector<double> totals;

    double total_at(const DiscreteState& s) const;
    double average_at(const DiscreteState& s) const;
};

/// Exact best response of one side against a frozen table policy of the
/// other, over the same discrete state space. The fixed policy must match
/// the game, mechanism and unit granularity of the search.
BestResponse best_response_search(const GameGraph& game, Mechanism mech, const TablePolicy& fixed,
                                  Player responder, int units_max, int units_min, int horizon,
                                  const OracleLimits& limits = {});

} // namespace bidding

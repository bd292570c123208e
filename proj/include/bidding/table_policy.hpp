#pragma once

#include <cstdint>
#include <vector>

#include "bidding/game.hpp"

namespace bidding {

enum class Player { Max, Min };

inline Player opponent(Player p) { return p == Player::Max ? Player::Min : Player::Max; }

/// Budget state of the discrete oracle: integer units per player plus the
/// number of bidding rounds still to play.
struct DiscreteState {
    int vertex = 0;
    int units_max = 0;
    int units_min = 0;
    int rounds_remaining = 0;
};

struct TableAction {
    int16_t bid_units = 0;
    int16_t move_to = 0;
};

/// Deterministic policy table over discrete states, extracted from backward
/// induction. Lookups clamp rounds-remaining into the available layers, so a
/// table can drive simulations far longer than its own horizon (the deepest
/// layer acts as the stationary policy).
class TablePolicy {
public:
    TablePolicy() = default;
    TablePolicy(Player side, Mechanism mech, int vertex_count, int units_max0, int units_min0,
                int horizon);

    /// Same action in every state: bid a fixed amount, move to the side's
    /// weight-preferred successor.
    static TablePolicy constant(const GameGraph& game, Player side, Mechanism mech, int units_max0,
                                int units_min0, int horizon, int bid_units);

    TableAction at(const DiscreteState& s) const;
    void set(const DiscreteState& s, TableAction action);

    Player side() const { return side_; }
    Mechanism mechanism() const { return mech_; }
    int vertex_count() const { return vertex_count_; }
    int units_max0() const { return units_max0_; }
    int units_min0() const { return units_min0_; }
    int horizon() const { return horizon_; }
    int cap_max() const { return cap_max_; }
    int cap_min() const { return cap_min_; }

    std::size_t index(int v, int um, int un, int t) const;

private:
    Player side_ = Player::Max;
    Mechanism mech_;
    int vertex_count_ = 0;
    int units_max0_ = 0;
    int units_min0_ = 0;
    int horizon_ = 0;
    int cap_max_ = 0; // Richman budgets can exceed the initial stock
    int cap_min_ = 0;
    std::vector<TableAction> actions_;
};

} // namespace bidding

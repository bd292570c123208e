#include "bidding/oracle.hpp"

#include <algorithm>
#include <limits>

#include "bidding/errors.hpp"
#include "bidding/parallel.hpp"

namespace bidding {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnitBudgets {
    int units_max;
    int units_min;
};

UnitBudgets after_bids(Mechanism mech, int um, int un, int bid_max, int bid_min, bool max_wins) {
    if (mech.recipient == RecipientRule::Richman) {
        if (mech.price == PriceRule::AllPay) {
            return {um - bid_max + bid_min, un - bid_min + bid_max};
        }
        return max_wins ? UnitBudgets{um - bid_max, un + bid_max}
                        : UnitBudgets{um + bid_min, un - bid_min};
    }
    if (mech.price == PriceRule::AllPay) return {um - bid_max, un - bid_min};
    return max_wins ? UnitBudgets{um - bid_max, un} : UnitBudgets{um, un - bid_min};
}

struct Grid {
    Mechanism mech;
    int vertices;
    int cap_max;
    int cap_min;
    int horizon;
    int total; // conserved unit count under Richman

    std::size_t layer_size() const {
        return std::size_t(vertices) * std::size_t(cap_max + 1) * std::size_t(cap_min + 1);
    }
    std::size_t index(int v, int um, int un, int t) const {
        return ((std::size_t(t) * std::size_t(vertices) + std::size_t(v)) * std::size_t(cap_max + 1) +
                std::size_t(um)) *
                   std::size_t(cap_min + 1) +
               std::size_t(un);
    }
    bool valid(int um, int un) const {
        if (um < 0 || un < 0 || um > cap_max || un > cap_min) return false;
        if (mech.recipient == RecipientRule::Richman && um + un != total) return false;
        return true;
    }
};

// Backward induction leaves many bids exactly tied (a win always costs a
// whole unit, so budget-versus-round accounting often balances several
// ways). Under the simulation wrapper a one-unit bid is the proportional
// stake, while a zero bid concedes the round outright, so among tied actions
// a one-unit bid is preferred and a zero bid is the last resort.
int bid_preference(int bid) {
    if (bid == 1) return 0;
    if (bid == 0) return 2;
    return 1;
}

Grid make_grid(const GameGraph& game, Mechanism mech, int units_max, int units_min, int horizon,
               const OracleLimits& limits) {
    if (units_max < 0 || units_min < 0 || units_max > limits.units_cap ||
        units_min > limits.units_cap) {
        throw ValidationError("oracle units out of range");
    }
    if (horizon < 1 || horizon > limits.horizon_cap) {
        throw ValidationError("oracle horizon out of range");
    }
    if (game.vertex_count() > limits.vertex_cap) {
        throw ValidationError("oracle supports at most " + std::to_string(limits.vertex_cap) +
                              " vertices");
    }
    Grid g;
    g.mech = mech;
    g.vertices = game.vertex_count();
    g.horizon = horizon;
    g.total = units_max + units_min;
    if (mech.recipient == RecipientRule::Richman) {
        g.cap_max = g.total;
        g.cap_min = g.total;
    } else {
        g.cap_max = units_max;
        g.cap_min = units_min;
    }
    long states = long(g.layer_size()) * long(horizon + 1);
    if (states > limits.state_cap) {
        throw ValidationError("oracle state space exceeds cap (" + std::to_string(states) + ")");
    }
    return g;
}

// Per-layer winner continuation: best (resp. worst) successor value given
// the budgets after the bids are settled.
struct MoveValues {
    std::vector<double> best;
    std::vector<double> worst;
    std::vector<int16_t> best_arg;
    std::vector<int16_t> worst_arg;

    std::size_t index(const Grid& g, int v, int um, int un) const {
        return (std::size_t(v) * std::size_t(g.cap_max + 1) + std::size_t(um)) *
                   std::size_t(g.cap_min + 1) +
               std::size_t(un);
    }
};

void fill_move_values(const GameGraph& game, const Grid& grid, const std::vector<double>& totals,
                      int prev_layer, MoveValues& mv) {
    std::size_t n = grid.layer_size();
    mv.best.assign(n, -kInf);
    mv.worst.assign(n, kInf);
    mv.best_arg.assign(n, 0);
    mv.worst_arg.assign(n, 0);
    for (int v = 0; v < grid.vertices; ++v) {
        for (int um = 0; um <= grid.cap_max; ++um) {
            for (int un = 0; un <= grid.cap_min; ++un) {
                if (!grid.valid(um, un)) continue;
                std::size_t at = mv.index(grid, v, um, un);
                for (int u : game.successors(v)) {
                    double val =
                        game.weight_value(u) + totals[grid.index(u, um, un, prev_layer)];
                    if (val > mv.best[at]) {
                        mv.best[at] = val;
                        mv.best_arg[at] = int16_t(u);
                    }
                    if (val < mv.worst[at]) {
                        mv.worst[at] = val;
                        mv.worst_arg[at] = int16_t(u);
                    }
                }
            }
        }
    }
}

} // namespace

TablePolicy::TablePolicy(Player side, Mechanism mech, int vertex_count, int units_max0,
                         int units_min0, int horizon)
    : side_(side),
      mech_(mech),
      vertex_count_(vertex_count),
      units_max0_(units_max0),
      units_min0_(units_min0),
      horizon_(horizon) {
    if (mech.recipient == RecipientRule::Richman) {
        cap_max_ = units_max0 + units_min0;
        cap_min_ = units_max0 + units_min0;
    } else {
        cap_max_ = units_max0;
        cap_min_ = units_min0;
    }
    actions_.assign(std::size_t(horizon + 1) * std::size_t(vertex_count) *
                        std::size_t(cap_max_ + 1) * std::size_t(cap_min_ + 1),
                    TableAction{});
}

std::size_t TablePolicy::index(int v, int um, int un, int t) const {
    return ((std::size_t(t) * std::size_t(vertex_count_) + std::size_t(v)) *
                std::size_t(cap_max_ + 1) +
            std::size_t(um)) *
               std::size_t(cap_min_ + 1) +
           std::size_t(un);
}

TableAction TablePolicy::at(const DiscreteState& s) const {
    int t = std::clamp(s.rounds_remaining, 1, horizon_);
    int um = std::clamp(s.units_max, 0, cap_max_);
    int un = std::clamp(s.units_min, 0, cap_min_);
    return actions_[index(s.vertex, um, un, t)];
}

void TablePolicy::set(const DiscreteState& s, TableAction action) {
    actions_[index(s.vertex, s.units_max, s.units_min, s.rounds_remaining)] = action;
}

TablePolicy TablePolicy::constant(const GameGraph& game, Player side, Mechanism mech,
                                  int units_max0, int units_min0, int horizon, int bid_units) {
    TablePolicy policy(side, mech, game.vertex_count(), units_max0, units_min0, horizon);
    for (int v = 0; v < game.vertex_count(); ++v) {
        int move = game.successors(v)[0];
        for (int u : game.successors(v)) {
            bool better = side == Player::Max ? game.weight_value(u) > game.weight_value(move)
                                              : game.weight_value(u) < game.weight_value(move);
            if (better) move = u;
        }
        for (int t = 0; t <= horizon; ++t) {
            for (int um = 0; um <= policy.cap_max(); ++um) {
                for (int un = 0; un <= policy.cap_min(); ++un) {
                    int own = side == Player::Max ? um : un;
                    policy.set({v, um, un, t},
                               {int16_t(std::min(bid_units, own)), int16_t(move)});
                }
            }
        }
    }
    return policy;
}

double OracleResult::total_at(const DiscreteState& s) const {
    return totals[committed_policy.index(s.vertex, s.units_max, s.units_min, s.rounds_remaining)];
}

double OracleResult::average_at(const DiscreteState& s) const {
    if (s.rounds_remaining <= 0) throw ValidationError("average needs at least one round");
    return total_at(s) / double(s.rounds_remaining);
}

double OracleResult::value_at_full(int start_vertex) const {
    return average_at({start_vertex, units_max0, units_min0, horizon});
}

OracleResult discrete_minimax(const GameGraph& game, Mechanism mech, int units_max, int units_min,
                              int horizon, Player committed, const OracleLimits& limits) {
    Grid grid = make_grid(game, mech, units_max, units_min, horizon, limits);

    OracleResult out;
    out.committed = committed;
    out.mech = mech;
    out.units_max0 = units_max;
    out.units_min0 = units_min;
    out.horizon = horizon;
    out.vertex_count = game.vertex_count();
    out.totals.assign(grid.layer_size() * std::size_t(horizon + 1), 0.0);
    out.committed_policy =
        TablePolicy(committed, mech, game.vertex_count(), units_max, units_min, horizon);
    out.responder_policy =
        TablePolicy(opponent(committed), mech, game.vertex_count(), units_max, units_min, horizon);

    const bool max_commits = committed == Player::Max;
    MoveValues mv;
    for (int t = 1; t <= horizon; ++t) {
        fill_move_values(game, grid, out.totals, t - 1, mv);
        parallel_for(grid.vertices, [&](int v) {
            for (int um = 0; um <= grid.cap_max; ++um) {
                for (int un = 0; un <= grid.cap_min; ++un) {
                    if (!grid.valid(um, un)) continue;

                    double best = max_commits ? -kInf : kInf;
                    TableAction best_action{};
                    TableAction best_reply{};

                    int own_units = max_commits ? um : un;
                    for (int bid = 0; bid <= own_units; ++bid) {
                        for (int move : game.successors(v)) {
                            // opponent's best response to the committed pair
                            double reply_best = max_commits ? kInf : -kInf;
                            TableAction reply{};
                            int reply_units = max_commits ? un : um;
                            for (int rb = 0; rb <= reply_units; ++rb) {
                                int bid_max = max_commits ? bid : rb;
                                int bid_min = max_commits ? rb : bid;
                                bool max_wins = bid_max > bid_min;
                                auto next = after_bids(mech, um, un, bid_max, bid_min, max_wins);
                                double val;
                                int16_t reply_move;
                                bool committed_wins = max_wins == max_commits;
                                if (committed_wins) {
                                    val = game.weight_value(move) +
                                          out.totals[grid.index(move, next.units_max,
                                                                next.units_min, t - 1)];
                                    std::size_t mvi = mv.index(grid, v, next.units_max, next.units_min);
                                    reply_move = max_commits ? mv.worst_arg[mvi] : mv.best_arg[mvi];
                                } else {
                                    std::size_t mvi = mv.index(grid, v, next.units_max, next.units_min);
                                    val = max_commits ? mv.worst[mvi] : mv.best[mvi];
                                    reply_move = max_commits ? mv.worst_arg[mvi] : mv.best_arg[mvi];
                                }
                                bool improves = max_commits ? val < reply_best : val > reply_best;
                                if (improves) {
                                    reply_best = val;
                                    reply = {int16_t(rb), reply_move};
                                }
                            }
                            bool improves = max_commits ? reply_best > best : reply_best < best;
                            bool tie_preferred =
                                reply_best == best &&
                                bid_preference(bid) < bid_preference(best_action.bid_units);
                            if (improves || tie_preferred) {
                                best = reply_best;
                                best_action = {int16_t(bid), int16_t(move)};
                                best_reply = reply;
                            }
                        }
                    }
                    out.totals[grid.index(v, um, un, t)] = best;
                    out.committed_policy.set({v, um, un, t}, best_action);
                    out.responder_policy.set({v, um, un, t}, best_reply);
                }
            }
        });
    }
    return out;
}

double BestResponse::total_at(const DiscreteState& s) const {
    return totals[policy.index(s.vertex, s.units_max, s.units_min, s.rounds_remaining)];
}

double BestResponse::average_at(const DiscreteState& s) const {
    if (s.rounds_remaining <= 0) throw ValidationError("average needs at least one round");
    return total_at(s) / double(s.rounds_remaining);
}

BestResponse best_response_search(const GameGraph& game, Mechanism mech, const TablePolicy& fixed,
                                  Player responder, int units_max, int units_min, int horizon,
                                  const OracleLimits& limits) {
    if (fixed.side() == responder) {
        throw ValidationError("fixed policy and responder must be opposite sides");
    }
    if (fixed.vertex_count() != game.vertex_count() || !(fixed.mechanism() == mech)) {
        throw ValidationError("fixed policy does not match this game and mechanism");
    }
    Grid grid = make_grid(game, mech, units_max, units_min, horizon, limits);
    if (fixed.cap_max() != grid.cap_max || fixed.cap_min() != grid.cap_min) {
        throw ValidationError("fixed policy granularity does not match the search units");
    }

    BestResponse out;
    out.policy = TablePolicy(responder, mech, game.vertex_count(), units_max, units_min, horizon);
    out.totals.assign(grid.layer_size() * std::size_t(horizon + 1), 0.0);

    const bool responder_is_max = responder == Player::Max;
    MoveValues mv;
    for (int t = 1; t <= horizon; ++t) {
        fill_move_values(game, grid, out.totals, t - 1, mv);
        parallel_for(grid.vertices, [&](int v) {
            for (int um = 0; um <= grid.cap_max; ++um) {
                for (int un = 0; un <= grid.cap_min; ++un) {
                    if (!grid.valid(um, un)) continue;
                    TableAction fa = fixed.at({v, um, un, t});
                    int fixed_units = responder_is_max ? un : um;
                    int fixed_bid = std::min(int(fa.bid_units), fixed_units);

                    double best = responder_is_max ? -kInf : kInf;
                    TableAction best_action{};
                    int own_units = responder_is_max ? um : un;
                    for (int bid = 0; bid <= own_units; ++bid) {
                        int bid_max = responder_is_max ? bid : fixed_bid;
                        int bid_min = responder_is_max ? fixed_bid : bid;
                        bool max_wins = bid_max > bid_min;
                        auto next = after_bids(mech, um, un, bid_max, bid_min, max_wins);
                        bool responder_wins = max_wins == responder_is_max;
                        double val;
                        int16_t move;
                        if (responder_wins) {
                            std::size_t mvi = mv.index(grid, v, next.units_max, next.units_min);
                            val = responder_is_max ? mv.best[mvi] : mv.worst[mvi];
                            move = responder_is_max ? mv.best_arg[mvi] : mv.worst_arg[mvi];
                        } else {
                            val = game.weight_value(fa.move_to) +
                                  out.totals[grid.index(fa.move_to, next.units_max, next.units_min,
                                                        t - 1)];
                            std::size_t mvi = mv.index(grid, v, next.units_max, next.units_min);
                            move = responder_is_max ? mv.best_arg[mvi] : mv.worst_arg[mvi];
                        }
                        bool improves = responder_is_max ? val > best : val < best;
                        bool tie_preferred =
                            val == best && bid_preference(bid) < bid_preference(best_action.bid_units);
                        if (improves || tie_preferred) {
                            best = val;
                            best_action = {int16_t(bid), move};
                        }
                    }
                    out.totals[grid.index(v, um, un, t)] = best;
                    out.policy.set({v, um, un, t}, best_action);
                }
            }
        });
    }
    out.value = out.total_at({0, units_max, units_min, horizon}) / double(horizon);
    return out;
}

} // namespace bidding

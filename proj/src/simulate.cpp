#include "bidding/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bidding/errors.hpp"

namespace bidding {

namespace {

double round_contribution(const PlayRound& r, Player p, PriceRule price) {
    double bid = p == Player::Max ? r.bid_max : r.bid_min;
    if (price == PriceRule::AllPay) return bid;
    return r.winner == p ? bid : 0.0;
}

int preferred_successor(const GameGraph& game, int v, Player side) {
    int move = game.successors(v)[0];
    for (int u : game.successors(v)) {
        bool better = side == Player::Max ? game.weight_value(u) > game.weight_value(move)
                                          : game.weight_value(u) < game.weight_value(move);
        if (better) move = u;
    }
    return move;
}

const char* player_name(Player p) { return p == Player::Max ? "Max" : "Min"; }

} // namespace

double PlayView::investment(Player p) const {
    double sum = 0.0;
    for (const auto& r : rounds) sum += round_contribution(r, p, mech.price);
    return sum;
}

double PlayView::available_with_initial(Player p, double initial) const {
    // fold round by round: subtracting a total investment that converges to
    // the initial budget would cancel catastrophically, freezing the
    // geometrically shrinking bids of long plays
    double avail = initial;
    for (const auto& r : rounds) {
        avail -= round_contribution(r, p, mech.price);
        if (mech.recipient == RecipientRule::Richman) {
            avail += round_contribution(r, opponent(p), mech.price);
        }
    }
    return avail;
}

double PlayView::available(Player p) const {
    return available_with_initial(p, p == Player::Max ? budget_max0 : budget_min0);
}

std::pair<double, double> budgets_after(const PlayRecord& record, std::size_t round_count) {
    double inv_max = 0.0;
    double inv_min = 0.0;
    for (std::size_t i = 0; i < round_count && i < record.rounds.size(); ++i) {
        inv_max += round_contribution(record.rounds[i], Player::Max, record.mech.price);
        inv_min += round_contribution(record.rounds[i], Player::Min, record.mech.price);
    }
    if (record.mech.recipient == RecipientRule::Richman) {
        return {record.budget_max0 - inv_max + inv_min, record.budget_min0 - inv_min + inv_max};
    }
    return {record.budget_max0 - inv_max, record.budget_min0 - inv_min};
}

PlayRecord run_play(const GameGraph& game, const Strategy& max_strategy,
                    const Strategy& min_strategy, double budget_max, double budget_min,
                    Mechanism mech, int horizon, double granularity) {
    if (horizon < 1) throw ValidationError("horizon must be at least 1");
    if (budget_max < 0.0 || budget_min < 0.0) throw ValidationError("budgets must be non-negative");

    PlayRecord record;
    record.mech = mech;
    record.initial_vertex = 0;
    record.budget_max0 = budget_max;
    record.budget_min0 = budget_min;
    record.granularity = granularity;
    record.rounds.reserve(std::size_t(horizon));

    double avail_max = budget_max;
    double avail_min = budget_min;

    for (int round = 0; round < horizon; ++round) {
        PlayView view = record.view(game);
        int at = view.current_vertex();
        BidAction action_max = max_strategy.act(view, Player::Max);
        BidAction action_min = min_strategy.act(view, Player::Min);

        auto settle = [&](BidAction& action, Player who, double avail) {
            if (granularity > 0.0) {
                action.bid = std::floor(action.bid / granularity + 1e-9) * granularity;
            }
            if (action.bid < -1e-12 || action.bid > avail + 1e-9 * std::max(1.0, avail)) {
                throw ValidationError(std::string(player_name(who)) + " emitted an illegal bid " +
                                      std::to_string(action.bid) + " at round " +
                                      std::to_string(round));
            }
            action.bid = std::clamp(action.bid, 0.0, avail);
            if (!game.has_edge(at, action.move_to)) {
                throw ValidationError(std::string(player_name(who)) +
                                      " chose an illegal successor at round " +
                                      std::to_string(round));
            }
        };
        settle(action_max, Player::Max, avail_max);
        settle(action_min, Player::Min, avail_min);

        // ties go to Min
        Player winner = action_max.bid > action_min.bid ? Player::Max : Player::Min;
        int next = winner == Player::Max ? action_max.move_to : action_min.move_to;

        if (mech.recipient == RecipientRule::Richman) {
            if (mech.price == PriceRule::AllPay) {
                avail_max += action_min.bid - action_max.bid;
                avail_min += action_max.bid - action_min.bid;
            } else if (winner == Player::Max) {
                avail_max -= action_max.bid;
                avail_min += action_max.bid;
            } else {
                avail_min -= action_min.bid;
                avail_max += action_min.bid;
            }
        } else {
            if (mech.price == PriceRule::AllPay) {
                avail_max -= action_max.bid;
                avail_min -= action_min.bid;
            } else if (winner == Player::Max) {
                avail_max -= action_max.bid;
            } else {
                avail_min -= action_min.bid;
            }
        }

        record.rounds.push_back({action_max.bid, action_min.bid, winner, next});
    }
    return record;
}

PayoffEstimate mean_payoff_estimate(const GameGraph& game, const PlayRecord& record,
                                    double window) {
    if (record.rounds.empty()) throw ValidationError("cannot estimate payoff of an empty play");
    if (!(window > 0.0 && window <= 1.0)) throw ValidationError("window must lie in (0,1]");

    PayoffEstimate out;
    for (const auto& r : record.rounds) out.full += game.weight_value(r.vertex);
    out.full /= double(record.rounds.size());

    std::size_t count = std::max<std::size_t>(
        1, std::size_t(std::ceil(window * double(record.rounds.size()))));
    count = std::min(count, record.rounds.size());
    for (std::size_t i = record.rounds.size() - count; i < record.rounds.size(); ++i) {
        out.trailing += game.weight_value(record.rounds[i].vertex);
    }
    out.trailing /= double(count);
    return out;
}

Strategy make_table_strategy(const GameGraph& game, TablePolicy table, Player side,
                             double own_initial, double opponent_initial_belief,
                             int min_stake_units) {
    std::vector<int> fallback(static_cast<std::size_t>(game.vertex_count()));
    for (int v = 0; v < game.vertex_count(); ++v) fallback[size_t(v)] = preferred_successor(game, v, side);

    Strategy strategy;
    strategy.declared_budget = own_initial;
    strategy.act = [table = std::move(table), side, own_initial, opponent_initial_belief,
                    min_stake_units, fallback](const PlayView& view, Player self) -> BidAction {
        int at = view.current_vertex();
        double own_avail = view.available_with_initial(self, own_initial);
        int own_nominal = side == Player::Max ? table.units_max0() : table.units_min0();
        if (own_avail <= 0.0 || own_nominal <= 0) {
            return {0.0, fallback[size_t(at)]};
        }

        DiscreteState state{at, 0, 0, table.horizon()};
        double unit;
        if (table.mechanism().recipient == RecipientRule::Richman) {
            // the pot is conserved, so units keep their absolute size and the
            // state sits on the constant-total diagonal
            int total = table.units_max0() + table.units_min0();
            unit = (own_initial + opponent_initial_belief) / double(total);
            int own_units = int(std::clamp<long long>(std::llround(own_avail / unit), 0, total));
            state.units_max = side == Player::Max ? own_units : total - own_units;
            state.units_min = side == Player::Max ? total - own_units : own_units;
        } else {
            // poorman budgets shrink geometrically: rescale every round so the
            // own side sits at its nominal unit count and bids shrink with it
            unit = own_avail / double(own_nominal);
            double opp_avail =
                std::max(0.0, view.available_with_initial(opponent(self), opponent_initial_belief));
            int opp_cap = side == Player::Max ? table.cap_min() : table.cap_max();
            int opp_units = int(std::clamp<long long>(std::llround(opp_avail / unit), 0, opp_cap));
            state.units_max = side == Player::Max ? own_nominal : opp_units;
            state.units_min = side == Player::Max ? opp_units : own_nominal;
        }

        TableAction action = table.at(state);
        int own_units = side == Player::Max ? state.units_max : state.units_min;
        int bid_units = std::max(int(action.bid_units), std::min(min_stake_units, own_units));
        double bid = std::min(double(bid_units) * unit, own_avail);
        return {bid, int(action.move_to)};
    };
    return strategy;
}

Strategy naive_fully_informed_min(const GameGraph& game, double budget_min, double budget_max,
                                  const TablePolicy& table) {
    return make_table_strategy(game, table, Player::Min, budget_min, budget_max);
}

Strategy make_wallet_strategy(const GameGraph& /*game*/, std::vector<double> xs,
                              std::vector<Strategy> subpolicies, const BudgetDistribution& gamma,
                              Mechanism mech) {
    const int n = gamma.size();
    if (mech.recipient != RecipientRule::Poorman) {
        throw ValidationError("wallet strategies are defined for poorman bidding only");
    }
    if (int(xs.size()) != n || int(subpolicies.size()) != n) {
        throw ValidationError("wallet strategy needs one cut and one subpolicy per support atom");
    }
    for (size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] < xs[i - 1] - 1e-12) throw ValidationError("wallet cuts must be non-decreasing");
    }
    std::vector<double> thresholds(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) thresholds[size_t(i)] = gamma.budget_value(i);

    Strategy strategy;
    strategy.declared_budget = xs.back();
    strategy.act = [xs = std::move(xs), subpolicies = std::move(subpolicies), thresholds,
                    mech](const PlayView& view, Player self) -> BidAction {
        Player other = opponent(self);
        const int n = int(xs.size());

        // active wallet and the round at which it took over
        int wallet = 0;
        std::size_t start = 0;
        double spent = 0.0;
        for (std::size_t r = 0; r < view.rounds.size() && wallet + 1 < n; ++r) {
            spent += round_contribution(view.rounds[r], other, mech.price);
            while (wallet + 1 < n && spent > thresholds[size_t(wallet)]) {
                ++wallet;
                start = r + 1;
            }
        }

        PlayView sub;
        sub.game = view.game;
        sub.mech = view.mech;
        sub.start_vertex = start == 0 ? view.start_vertex : view.rounds[start - 1].vertex;
        sub.budget_max0 = xs[size_t(wallet)] - (wallet > 0 ? xs[size_t(wallet) - 1] : 0.0);
        sub.budget_min0 = thresholds[size_t(wallet)] - (wallet > 0 ? thresholds[size_t(wallet) - 1] : 0.0);
        if (self == Player::Min) std::swap(sub.budget_max0, sub.budget_min0);
        sub.rounds = view.rounds.subspan(start);

        BidAction action = subpolicies[size_t(wallet)].act(sub, self);
        double wallet_avail = sub.available(self);
        if (action.bid > wallet_avail + 1e-9) {
            throw ValidationError("wallet subpolicy " + std::to_string(wallet) +
                                  " emitted a bid above its wallet");
        }
        return action;
    };
    return strategy;
}

double expected_payoff(const GameGraph& game, const StrategyFamily& max_family,
                       const StrategyFamily& min_family, const BudgetDistribution& beta,
                       const BudgetDistribution& gamma, Mechanism mech, int horizon, double window,
                       double granularity) {
    if (int(max_family.size()) != beta.size() || int(min_family.size()) != gamma.size()) {
        throw ValidationError("strategy families must cover the distribution supports");
    }
    // accumulation order fixed: beta-major, then gamma
    double sum = 0.0;
    for (int i = 0; i < beta.size(); ++i) {
        for (int j = 0; j < gamma.size(); ++j) {
            PlayRecord record = run_play(game, max_family[size_t(i)], min_family[size_t(j)],
                                         beta.budget_value(i), gamma.budget_value(j), mech, horizon,
                                         granularity);
            sum += beta.probability_value(i) * gamma.probability_value(j) *
                   mean_payoff_estimate(game, record, window).trailing;
        }
    }
    return sum;
}

std::string to_csv(const PlayRecord& record, const GameGraph& game) {
    std::ostringstream out;
    out << "round,bid_max,bid_min,winner,vertex,budget_max,budget_min\n";
    out.precision(17);
    double inv_max = 0.0;
    double inv_min = 0.0;
    for (std::size_t i = 0; i < record.rounds.size(); ++i) {
        const auto& r = record.rounds[i];
        inv_max += round_contribution(r, Player::Max, record.mech.price);
        inv_min += round_contribution(r, Player::Min, record.mech.price);
        double bmax, bmin;
        if (record.mech.recipient == RecipientRule::Richman) {
            bmax = record.budget_max0 - inv_max + inv_min;
            bmin = record.budget_min0 - inv_min + inv_max;
        } else {
            bmax = record.budget_max0 - inv_max;
            bmin = record.budget_min0 - inv_min;
        }
        out << i << ',' << r.bid_max << ',' << r.bid_min << ','
            << (r.winner == Player::Max ? "Max" : "Min") << ',' << game.id(r.vertex) << ',' << bmax
            << ',' << bmin << '\n';
    }
    return out.str();
}

} // namespace bidding

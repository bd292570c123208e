#include "bidding/cli.hpp"

#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bidding/distribution.hpp"
#include "bidding/errors.hpp"
#include "bidding/game.hpp"
#include "bidding/oracle.hpp"
#include "bidding/partial_value.hpp"
#include "bidding/random_turn.hpp"
#include "bidding/simulate.hpp"
#include "bidding/threshold.hpp"

namespace bidding {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("file not found: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

GameGraph load_game(const std::string& spec) {
    if (!spec.empty() && spec.front() == '{') return parse_game(spec);
    return parse_game(read_file(spec));
}

Strategy make_random_strategy(const GameGraph& game, unsigned seed) {
    auto rng = std::make_shared<std::mt19937>(seed);
    Strategy s;
    s.act = [rng](const PlayView& view, Player self) -> BidAction {
        double avail = view.available(self);
        std::uniform_real_distribution<double> bid(0.0, std::max(0.0, avail));
        auto succ = view.game->successors(view.current_vertex());
        std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
        return {bid(*rng), succ[pick(*rng)]};
    };
    return s;
}

json ledger_to_json(const LedgerReport& report) {
    json rounds = json::array();
    for (const auto& row : report.rounds) {
        json budgets_min = json::array();
        for (const auto& c : row.min_budgets) budgets_min.push_back(c.to_string());
        rounds.push_back({{"index", row.index},
                          {"stake_max", row.stake_max.to_string()},
                          {"stake_min", row.stake_min.to_string()},
                          {"budget_max", row.budget_max.to_string()},
                          {"budgets_min", std::move(budgets_min)},
                          {"potential", row.potential_now},
                          {"p2", row.p2_ok},
                          {"p3", row.p3_ok},
                          {"p4", row.p4_ok},
                          {"stake_identity", row.stake_ratio_ok},
                          {"stake_exact", row.stake_exact},
                          {"induction", row.induction_ok},
                          {"jensen", row.jensen_ok},
                          {"exact", row.exact}});
    }
    return {{"lambda", report.lambda.to_string()},
            {"rho", report.rho.to_string()},
            {"potential", report.base_potential.to_string()},
            {"o3_bound", report.o3_bound},
            {"bound_finite", report.bound_finite},
            {"verdict", report.all_ok},
            {"rounds", std::move(rounds)}};
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"solvers, simulators and a discrete oracle for bidding games on graphs"};
    app.require_subcommand(1);

    double tol = 1e-9;
    int grid = 512;
    unsigned seed = 1;
    bool csv = false;
    app.add_option("--tol", tol, "solver tolerance");
    app.add_option("--grid", grid, "optimizer grid points per segment");
    app.add_option("--seed", seed, "seed for randomized strategies");
    app.add_flag("--csv", csv, "emit tabular output as CSV where supported");

    std::function<void()> action;

    // solve-rt
    auto* solve_rt = app.add_subcommand("solve-rt", "value of the random-turn game at a bias");
    auto rt_game = std::make_shared<std::string>();
    auto rt_p = std::make_shared<double>(0.5);
    solve_rt->add_option("--game", *rt_game, "game file or inline JSON")->required();
    solve_rt->add_option("--p", *rt_p, "Max bias in [0,1]")->required();
    solve_rt->callback([&, rt_game, rt_p] {
        action = [&, rt_game, rt_p] {
            GameGraph game = load_game(*rt_game);
            if (game.objective() == Objective::MeanPayoff) {
                double value = random_turn_mean_payoff(game, *rt_p, tol);
                out << json{{"p", *rt_p}, {"value", value}}.dump(2) << "\n";
            } else {
                auto probs = random_turn_reach_probabilities(game, *rt_p);
                json by_vertex;
                for (int v = 0; v < game.vertex_count(); ++v) by_vertex[game.id(v)] = probs[size_t(v)];
                out << json{{"p", *rt_p}, {"reach_probabilities", by_vertex}}.dump(2) << "\n";
            }
        };
    });

    // threshold
    auto* threshold = app.add_subcommand("threshold", "reachability threshold ratios (first-price Richman)");
    auto th_game = std::make_shared<std::string>();
    threshold->add_option("--game", *th_game, "game file or inline JSON")->required();
    threshold->callback([&, th_game] {
        action = [&, th_game] {
            GameGraph game = load_game(*th_game);
            auto th = threshold_reach_richman(game);
            if (csv) {
                out << "vertex,threshold\n";
                out.precision(17);
                for (int v = 0; v < game.vertex_count(); ++v) {
                    out << game.id(v) << ',' << th.at(v) << '\n';
                }
                return;
            }
            json by_vertex;
            for (int v = 0; v < game.vertex_count(); ++v) by_vertex[game.id(v)] = th.at(v);
            out << json{{"thresholds", by_vertex}}.dump(2) << "\n";
        };
    });

    // qual-value
    auto* qual = app.add_subcommand("qual-value", "partial-information qualitative value");
    auto q_th = std::make_shared<std::string>();
    auto q_beta = std::make_shared<std::string>();
    auto q_gamma = std::make_shared<std::string>();
    qual->add_option("--th", *q_th, "threshold ratio, e.g. 2/3")->required();
    qual->add_option("--beta", *q_beta, "Max budget distribution")->required();
    qual->add_option("--gamma", *q_gamma, "Min budget distribution")->required();
    qual->callback([&, q_th, q_beta, q_gamma] {
        action = [&, q_th, q_beta, q_gamma] {
            Rational th = Rational::parse(*q_th);
            auto beta = parse_distribution_spec(*q_beta);
            auto gamma = parse_distribution_spec(*q_gamma);
            Rational value = qualitative_partial_value(th, beta, gamma);
            out << json{{"value", value.to_double()},
                        {"exact", value.to_string()},
                        {"expected_sign_payoff", expected_sign_payoff(value.to_double())}}
                       .dump(2)
                << "\n";
        };
    });

    // partial-value
    auto* partial = app.add_subcommand("partial-value", "partially-informed player's mean-payoff value");
    auto pv_game = std::make_shared<std::string>();
    auto pv_budget = std::make_shared<double>(1.0);
    auto pv_gamma = std::make_shared<std::string>();
    auto pv_mech = std::make_shared<std::string>("first-price-poorman");
    partial->add_option("--game", *pv_game, "game file or inline JSON")->required();
    partial->add_option("--B", *pv_budget, "Max budget")->required();
    partial->add_option("--gamma", *pv_gamma, "Min budget distribution")->required();
    partial->add_option("--mech", *pv_mech, "first-price-poorman or all-pay-poorman");
    partial->callback([&, pv_game, pv_budget, pv_gamma, pv_mech] {
        action = [&, pv_game, pv_budget, pv_gamma, pv_mech] {
            GameGraph game = load_game(*pv_game);
            auto gamma = parse_distribution_spec(*pv_gamma);
            OptimizeOptions options;
            options.grid = grid;
            auto result = optimize_partial_value(game, *pv_budget, gamma,
                                                 parse_mechanism(*pv_mech), options);
            out << json{{"value", result.value},
                        {"xs", result.xs},
                        {"ps", result.ps},
                        {"tolerance", result.uncertainty}}
                       .dump(2)
                << "\n";
        };
    });

    // potential
    auto* pot = app.add_subcommand("potential", "fully-informed value of the bowtie game");
    auto pot_budget = std::make_shared<std::string>("1");
    auto pot_gamma = std::make_shared<std::string>();
    pot->add_option("--B", *pot_budget, "Max budget (rational)")->required();
    pot->add_option("--gamma", *pot_gamma, "Min budget distribution")->required();
    pot->callback([&, pot_budget, pot_gamma] {
        action = [&, pot_budget, pot_gamma] {
            Rational value = potential(Rational::parse(*pot_budget), parse_distribution_spec(*pot_gamma));
            out << json{{"value", value.to_double()}, {"exact", value.to_string()}}.dump(2) << "\n";
        };
    });

    // gap
    auto* gap = app.add_subcommand("gap", "value gap on the bowtie under first-price poorman");
    auto gap_budget = std::make_shared<double>(1.0);
    auto gap_gamma = std::make_shared<std::string>();
    gap->add_option("--B", *gap_budget, "Max budget")->required();
    gap->add_option("--gamma", *gap_gamma, "Min budget distribution")->required();
    gap->callback([&, gap_budget, gap_gamma] {
        action = [&, gap_budget, gap_gamma] {
            auto report = value_gap_report(*gap_budget, parse_distribution_spec(*gap_gamma));
            out << json{{"mp_down", report.mp_down}, {"mp_up", report.mp_up}, {"gap", report.gap}}
                       .dump(2)
                << "\n";
        };
    });

    // ledger-check
    auto* ledger = app.add_subcommand("ledger-check", "verify the slow/fast budget-spending schedule");
    auto lg_budget = std::make_shared<std::string>("1");
    auto lg_gamma = std::make_shared<std::string>();
    auto lg_eps = std::make_shared<std::string>("1/10");
    auto lg_rounds = std::make_shared<long>(1000);
    ledger->add_option("--B", *lg_budget, "Max budget (rational)")->required();
    ledger->add_option("--gamma", *lg_gamma, "Min budget distribution")->required();
    ledger->add_option("--eps", *lg_eps, "slack in (0,1), rational");
    ledger->add_option("--rounds", *lg_rounds, "rounds to simulate (clamped to the bound)");
    ledger->callback([&, lg_budget, lg_gamma, lg_eps, lg_rounds] {
        action = [&, lg_budget, lg_gamma, lg_eps, lg_rounds] {
            auto report = check_potential_ledger(Rational::parse(*lg_budget),
                                                 parse_distribution_spec(*lg_gamma),
                                                 Rational::parse(*lg_eps), *lg_rounds);
            out << ledger_to_json(report).dump(2) << "\n";
        };
    });

    // simulate
    auto* sim = app.add_subcommand("simulate", "play one game out and estimate the payoff");
    auto sm_game = std::make_shared<std::string>();
    auto sm_mech = std::make_shared<std::string>("first-price-poorman");
    auto sm_bmax = std::make_shared<double>(1.0);
    auto sm_bmin = std::make_shared<double>(1.0);
    auto sm_horizon = std::make_shared<int>(1000);
    auto sm_units = std::make_shared<int>(16);
    auto sm_window = std::make_shared<double>(0.5);
    auto sm_gran = std::make_shared<double>(0.0);
    auto sm_max = std::make_shared<std::string>("oracle");
    auto sm_min = std::make_shared<std::string>("oracle");
    sim->add_option("--game", *sm_game, "game file or inline JSON")->required();
    sim->add_option("--mech", *sm_mech, "bidding mechanism");
    sim->add_option("--B", *sm_bmax, "Max budget");
    sim->add_option("--C", *sm_bmin, "Min budget");
    sim->add_option("--horizon", *sm_horizon, "number of rounds");
    sim->add_option("--units", *sm_units, "oracle granularity for table strategies");
    sim->add_option("--window", *sm_window, "trailing window fraction");
    sim->add_option("--granularity", *sm_gran,
                    "bid lattice step; 0 (default) keeps bids divisible so long plays track the "
                    "theory, 1/1024 gives bit-exact replay accounting");
    sim->add_option("--max-strategy", *sm_max, "oracle, zero or random");
    sim->add_option("--min-strategy", *sm_min, "oracle, zero or random");
    sim->callback([&, sm_game, sm_mech, sm_bmax, sm_bmin, sm_horizon, sm_units, sm_window, sm_gran,
                   sm_max, sm_min] {
        action = [&, sm_game, sm_mech, sm_bmax, sm_bmin, sm_horizon, sm_units, sm_window, sm_gran,
                  sm_max, sm_min] {
            GameGraph game = load_game(*sm_game);
            Mechanism mech = parse_mechanism(*sm_mech);
            if (*sm_bmax <= 0.0 || *sm_bmin < 0.0) {
                throw ValidationError("simulate needs a positive Max budget and non-negative Min budget");
            }

            int units_max = std::max(1, *sm_units);
            int units_min = std::max(1, int(std::llround(*sm_units * *sm_bmin / *sm_bmax)));
            int oracle_horizon = std::min(64, 2 * std::max(units_max, units_min));

            auto build = [&](Player side, const std::string& kind) -> Strategy {
                if (kind == "zero") {
                    TablePolicy zero = TablePolicy::constant(game, side, mech, units_max, units_min,
                                                             oracle_horizon, 0);
                    return make_table_strategy(game, zero, side,
                                               side == Player::Max ? *sm_bmax : *sm_bmin,
                                               side == Player::Max ? *sm_bmin : *sm_bmax, 0);
                }
                if (kind == "random") {
                    return make_random_strategy(game, seed + (side == Player::Max ? 0 : 1));
                }
                if (kind == "oracle") {
                    auto solved = discrete_minimax(game, mech, units_max, units_min, oracle_horizon, side);
                    return make_table_strategy(game, solved.committed_policy, side,
                                               side == Player::Max ? *sm_bmax : *sm_bmin,
                                               side == Player::Max ? *sm_bmin : *sm_bmax);
                }
                throw ValidationError("unknown strategy kind '" + kind + "'");
            };

            Strategy f = build(Player::Max, *sm_max);
            Strategy g = build(Player::Min, *sm_min);
            PlayRecord record = run_play(game, f, g, *sm_bmax, *sm_bmin, mech, *sm_horizon, *sm_gran);
            if (csv) {
                out << to_csv(record, game);
            } else {
                auto estimate = mean_payoff_estimate(game, record, *sm_window);
                out << json{{"trailing", estimate.trailing},
                            {"full", estimate.full},
                            {"rounds", record.rounds.size()}}
                           .dump(2)
                    << "\n";
            }
        };
    });

    // oracle
    auto* oracle = app.add_subcommand("oracle", "discrete backward-induction value");
    auto or_game = std::make_shared<std::string>();
    auto or_mech = std::make_shared<std::string>("first-price-poorman");
    auto or_units_max = std::make_shared<int>(16);
    auto or_units_min = std::make_shared<int>(-1);
    auto or_horizon = std::make_shared<int>(32);
    auto or_committed = std::make_shared<std::string>("max");
    auto or_start = std::make_shared<std::string>();
    oracle->add_option("--game", *or_game, "game file or inline JSON")->required();
    oracle->add_option("--mech", *or_mech, "bidding mechanism");
    oracle->add_option("--units", *or_units_max, "Max budget in units")->required();
    oracle->add_option("--units-min", *or_units_min, "Min budget in units (default: same)");
    oracle->add_option("--horizon", *or_horizon, "rounds")->required();
    oracle->add_option("--committed", *or_committed, "which side reveals its strategy: max or min");
    oracle->add_option("--start", *or_start, "start vertex id (default: first)");
    oracle->callback([&, or_game, or_mech, or_units_max, or_units_min, or_horizon, or_committed,
                      or_start] {
        action = [&, or_game, or_mech, or_units_max, or_units_min, or_horizon, or_committed,
                  or_start] {
            GameGraph game = load_game(*or_game);
            Player committed;
            if (*or_committed == "max") {
                committed = Player::Max;
            } else if (*or_committed == "min") {
                committed = Player::Min;
            } else {
                throw ValidationError("--committed must be max or min");
            }
            int units_min = *or_units_min < 0 ? *or_units_max : *or_units_min;
            auto result = discrete_minimax(game, parse_mechanism(*or_mech), *or_units_max,
                                           units_min, *or_horizon, committed);
            int start = 0;
            if (!or_start->empty()) {
                start = game.index_of(*or_start);
                if (start < 0) throw ValidationError("unknown start vertex '" + *or_start + "'");
            }
            out << json{{"value", result.value_at_full(start)},
                        {"committed", *or_committed},
                        {"units_max", *or_units_max},
                        {"units_min", units_min},
                        {"horizon", *or_horizon}}
                       .dump(2)
                << "\n";
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        action();
        return 0;
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const RationalOverflow& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace bidding

#include "bidding/partial_value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bidding {

namespace {

constexpr double kAdmissibleBand = 1e-9;

void require_poorman(Mechanism mech) {
    if (mech.recipient != RecipientRule::Poorman) {
        throw ValidationError("wallet sequences are defined for poorman bidding only");
    }
}

void require_solvable(const GameGraph& game) {
    if (game.objective() != Objective::MeanPayoff || !game.strongly_connected()) {
        throw ValidationError("operation requires a strongly connected mean-payoff game");
    }
}

bool two_vertex_complete(const GameGraph& game) {
    return game.objective() == Objective::MeanPayoff && game.vertex_count() == 2 &&
           game.has_edge(0, 0) && game.has_edge(0, 1) && game.has_edge(1, 0) && game.has_edge(1, 1);
}

double segment_bias(Mechanism mech, double d, double dc) {
    return mech.price == PriceRule::FirstPrice ? first_price_bias(d, dc) : all_pay_bias(d, dc);
}

} // namespace

double first_price_bias(double d, double dc) {
    if (d <= 0.0) return 0.0;
    return d / (d + dc);
}

double all_pay_bias(double d, double dc) {
    if (d <= dc) return 0.0;
    return 1.0 - dc / d;
}

double full_info_mean_payoff(const GameGraph& game, Mechanism mech, double ratio, double tol) {
    require_solvable(game);
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ValidationError("budget ratio must lie in (0,1), got " + std::to_string(ratio));
    }
    double bias = 0.0;
    if (mech.price == PriceRule::FirstPrice) {
        bias = mech.recipient == RecipientRule::Richman ? 0.5 : ratio;
    } else {
        bias = (mech.recipient == RecipientRule::Poorman && ratio > 0.5)
                   ? (2.0 * ratio - 1.0) / ratio
                   : 0.0;
    }
    return random_turn_mean_payoff(game, bias, tol);
}

RtValueSource::RtValueSource(const GameGraph& game, double tol, int grid_size)
    : game_(&game), tol_(tol) {
    if (two_vertex_complete(game)) {
        affine_ = true;
        double w0 = game.weight_value(0);
        double w1 = game.weight_value(1);
        floor_ = std::min(w0, w1);
        spread_ = std::abs(w0 - w1);
    } else {
        curve_.emplace(value_curve(game, grid_size, tol));
    }
}

double RtValueSource::operator()(double bias) const {
    if (affine_) return floor_ + bias * spread_;
    return curve_->eval(bias);
}

void RtValueSource::refine_at(double bias) {
    if (affine_) return;
    if (!(bias >= 0.0 && bias <= 1.0)) return;
    curve_->insert(bias, random_turn_mean_payoff(*game_, bias, tol_));
}

std::function<double(double)> RtValueSource::as_function() const {
    if (affine_) {
        double f = floor_;
        double s = spread_;
        return [f, s](double bias) { return f + bias * s; };
    }
    const ValueCurve* curve = &*curve_;
    return [curve](double bias) { return curve->eval(bias); };
}

AdmissibilityReport sequence_value(const std::function<double(double)>& rt_value,
                                   std::span<const double> xs, double budget,
                                   const BudgetDistribution& gamma, Mechanism mech) {
    require_poorman(mech);
    if (int(xs.size()) != gamma.size()) {
        throw ValidationError("sequence length must match the distribution support size");
    }
    const double scale = std::max(1.0, std::abs(budget));
    if (xs.front() < -1e-12 * scale) throw ValidationError("sequence entries must be non-negative");
    for (size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] < xs[i - 1] - 1e-12 * scale) {
            throw ValidationError("sequence must be non-decreasing");
        }
    }
    if (std::abs(xs.back() - budget) > 1e-9 * scale) {
        throw ValidationError("sequence must end at the full budget");
    }

    AdmissibilityReport report;
    report.xs.assign(xs.begin(), xs.end());
    double prev_x = 0.0;
    double prev_c = 0.0;
    for (int i = 0; i < gamma.size(); ++i) {
        double c = gamma.budget_value(i);
        double d = std::max(0.0, xs[size_t(i)] - prev_x);
        double bias = segment_bias(mech, d, c - prev_c);
        report.biases.push_back(bias);
        report.ps.push_back(rt_value(bias));
        report.value += gamma.probability_value(i) * report.ps.back();
        prev_x = xs[size_t(i)];
        prev_c = c;
    }
    report.admissible = true;
    for (size_t i = 1; i < report.ps.size(); ++i) {
        if (report.ps[i] > report.ps[i - 1] + kAdmissibleBand) {
            report.admissible = false;
            break;
        }
    }
    return report;
}

namespace {

struct DpEntry {
    double p = 0.0;
    double val = 0.0;
    int parent_grid = -1;
    int parent_entry = -1;
};

// Entries sorted by segment value p; query returns the best accumulated
// value among entries whose p does not fall below the requested floor.
struct DpState {
    std::vector<DpEntry> entries;
    std::vector<double> best_from;
    std::vector<int> arg_from;

    void finalize() {
        std::sort(entries.begin(), entries.end(),
                  [](const DpEntry& a, const DpEntry& b) { return a.p < b.p; });
        best_from.assign(entries.size(), 0.0);
        arg_from.assign(entries.size(), -1);
        double best = -std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int k = int(entries.size()) - 1; k >= 0; --k) {
            if (entries[size_t(k)].val > best) {
                best = entries[size_t(k)].val;
                arg = k;
            }
            best_from[size_t(k)] = best;
            arg_from[size_t(k)] = arg;
        }
    }

    int query(double floor) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), floor,
                                   [](const DpEntry& e, double f) { return e.p < f; });
        if (it == entries.end()) return -1;
        return arg_from[size_t(it - entries.begin())];
    }
};

struct PassOutcome {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<double> xs;
    bool found = false;
};

PassOutcome run_pass(const std::vector<std::vector<double>>& grids,
                     const BudgetDistribution& gamma, Mechanism mech,
                     const RtValueSource& rt) {
    const int n = int(grids.size());
    std::vector<std::vector<DpState>> states(static_cast<std::size_t>(n));

    std::vector<double> deltas(static_cast<std::size_t>(n));
    double prev_c = 0.0;
    for (int i = 0; i < n; ++i) {
        deltas[size_t(i)] = gamma.budget_value(i) - prev_c;
        prev_c = gamma.budget_value(i);
    }

    states[0].resize(grids[0].size());
    for (size_t a = 0; a < grids[0].size(); ++a) {
        double d = std::max(0.0, grids[0][a]);
        double p = rt(segment_bias(mech, d, deltas[0]));
        states[0][a].entries.push_back({p, gamma.probability_value(0) * p, -1, -1});
        states[0][a].finalize();
    }

    for (int i = 1; i < n; ++i) {
        states[size_t(i)].resize(grids[size_t(i)].size());
        for (size_t b = 0; b < grids[size_t(i)].size(); ++b) {
            auto& bucket = states[size_t(i)][b].entries;
            for (size_t a = 0; a < grids[size_t(i) - 1].size(); ++a) {
                if (grids[size_t(i) - 1][a] > grids[size_t(i)][b] + 1e-12) break;
                double d = std::max(0.0, grids[size_t(i)][b] - grids[size_t(i) - 1][a]);
                double p = rt(segment_bias(mech, d, deltas[size_t(i)]));
                int parent = states[size_t(i) - 1][a].query(p - kAdmissibleBand);
                if (parent < 0) continue;
                double val = states[size_t(i) - 1][a].entries[size_t(parent)].val +
                             gamma.probability_value(i) * p;
                bucket.push_back({p, val, int(a), parent});
            }
            states[size_t(i)][b].finalize();
        }
    }

    PassOutcome out;
    const auto& last = states[size_t(n) - 1];
    int best_grid = -1;
    int best_entry = -1;
    for (size_t b = 0; b < last.size(); ++b) {
        for (size_t k = 0; k < last[b].entries.size(); ++k) {
            if (last[b].entries[k].val > out.value) {
                out.value = last[b].entries[k].val;
                best_grid = int(b);
                best_entry = int(k);
            }
        }
    }
    if (best_grid < 0) return out;

    out.found = true;
    out.xs.assign(size_t(n), 0.0);
    int g = best_grid;
    int e = best_entry;
    for (int i = n - 1; i >= 0; --i) {
        out.xs[size_t(i)] = grids[size_t(i)][size_t(g)];
        const DpEntry& entry = states[size_t(i)][size_t(g)].entries[size_t(e)];
        g = entry.parent_grid;
        e = entry.parent_entry;
    }
    return out;
}

std::vector<double> window_grid(double center, double radius, double lo, double hi, int points) {
    double a = std::max(lo, center - radius);
    double b = std::min(hi, center + radius);
    std::vector<double> grid;
    grid.reserve(size_t(points) + 2);
    for (int k = 0; k <= points; ++k) {
        grid.push_back(a + (b - a) * double(k) / double(points));
    }
    grid.push_back(std::clamp(center, lo, hi));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-15; }),
               grid.end());
    return grid;
}

} // namespace

OptimizeResult optimize_partial_value(const GameGraph& game, double budget,
                                      const BudgetDistribution& gamma, Mechanism mech,
                                      const OptimizeOptions& options) {
    require_solvable(game);
    require_poorman(mech);
    if (budget < 0.0) throw ValidationError("budget must be non-negative");
    if (options.grid < 2) throw ValidationError("optimizer grid must have at least 2 points");

    const int n = gamma.size();
    RtValueSource rt(game, options.curve_tol);

    // first pass: full-range uniform grid, last cut pinned to the budget
    std::vector<std::vector<double>> grids(static_cast<std::size_t>(n));
    for (int i = 0; i + 1 < n; ++i) {
        auto& grid = grids[size_t(i)];
        for (int k = 0; k <= options.grid; ++k) {
            grid.push_back(budget * double(k) / double(options.grid));
        }
    }
    grids[size_t(n) - 1] = {budget};

    PassOutcome incumbent = run_pass(grids, gamma, mech, rt);
    if (!incumbent.found) throw SolverError("wallet optimizer found no admissible sequence", 0.0);

    double radius = 2.0 * budget / double(options.grid);
    for (int pass = 0; pass < options.refine_passes; ++pass) {
        if (!rt.exact()) {
            auto report = sequence_value(rt.as_function(), incumbent.xs, budget, gamma, mech);
            for (double bias : report.biases) rt.refine_at(bias);
        }
        for (int i = 0; i + 1 < n; ++i) {
            grids[size_t(i)] = window_grid(incumbent.xs[size_t(i)], radius, 0.0, budget, options.grid);
        }
        PassOutcome refined = run_pass(grids, gamma, mech, rt);
        if (refined.found && refined.value >= incumbent.value) incumbent = refined;
        radius = 4.0 * radius / double(options.grid);
    }

    auto fn = rt.as_function();
    auto report = sequence_value(fn, incumbent.xs, budget, gamma, mech);

    OptimizeResult result;
    result.value = report.value;
    result.xs = incumbent.xs;
    result.ps = report.ps;

    // local grid sensitivity around the incumbent
    double step = std::max(radius, 1e-12 * std::max(1.0, budget));
    for (int i = 0; i + 1 < n; ++i) {
        for (double sign : {-1.0, 1.0}) {
            auto xs = incumbent.xs;
            double lo = i > 0 ? xs[size_t(i) - 1] : 0.0;
            double hi = xs[size_t(i) + 1];
            xs[size_t(i)] = std::clamp(xs[size_t(i)] + sign * step, lo, hi);
            auto probe = sequence_value(fn, xs, budget, gamma, mech);
            result.uncertainty = std::max(result.uncertainty, std::abs(probe.value - report.value));
        }
    }
    return result;
}

OptimizeResult optimize_partial_value(const GameGraph& game, double budget,
                                      const BudgetDistribution& gamma, Mechanism mech,
                                      double tol) {
    OptimizeOptions options;
    options.tol = tol;
    return optimize_partial_value(game, budget, gamma, mech, options);
}

namespace {

Rational potential_over(const Rational& budget, std::span<const Rational> min_budgets,
                        std::span<const Rational> probabilities) {
    Rational out;
    for (size_t j = 0; j < min_budgets.size(); ++j) {
        Rational total = budget + min_budgets[j];
        if (total.is_zero()) throw ValidationError("potential undefined: zero-over-zero atom");
        out += probabilities[j] * (budget / total);
    }
    return out;
}

double potential_over(double budget, std::span<const double> min_budgets,
                      std::span<const double> probabilities) {
    double out = 0.0;
    for (size_t j = 0; j < min_budgets.size(); ++j) {
        double total = budget + min_budgets[j];
        if (total == 0.0) throw ValidationError("potential undefined: zero-over-zero atom");
        out += probabilities[j] * (budget / total);
    }
    return out;
}

} // namespace

Rational potential(const Rational& budget, const BudgetDistribution& gamma) {
    if (budget.is_negative()) throw ValidationError("budget must be non-negative");
    std::vector<Rational> budgets;
    std::vector<Rational> probs;
    for (const auto& [c, p] : gamma.atoms()) {
        budgets.push_back(c);
        probs.push_back(p);
    }
    return potential_over(budget, budgets, probs);
}

double potential(double budget, const BudgetDistribution& gamma) {
    if (budget < 0.0) throw ValidationError("budget must be non-negative");
    std::vector<double> budgets;
    std::vector<double> probs;
    for (int j = 0; j < gamma.size(); ++j) {
        budgets.push_back(gamma.budget_value(j));
        probs.push_back(gamma.probability_value(j));
    }
    return potential_over(budget, budgets, probs);
}

Rational bowtie_fully_informed_value(const Rational& budget, const BudgetDistribution& gamma) {
    return potential(budget, gamma);
}

ValueGap value_gap_report(double budget, const BudgetDistribution& gamma, double tol) {
    GameGraph bowtie = bowtie_game();
    Mechanism mech{PriceRule::FirstPrice, RecipientRule::Poorman};
    auto lower = optimize_partial_value(bowtie, budget, gamma, mech, tol);

    ValueGap out;
    out.mp_down = lower.value;
    out.mp_up = potential(budget, gamma);
    out.gap = out.mp_up - out.mp_down;
    out.xs = lower.xs;
    return out;
}

LedgerReport check_potential_ledger(const Rational& budget, const BudgetDistribution& gamma,
                                    const Rational& eps, long rounds) {
    if (!(eps > Rational(0)) || !(eps < Rational(1))) {
        throw ValidationError("eps must lie in (0,1)");
    }
    if (!(budget > Rational(0))) throw ValidationError("budget must be positive");
    if (rounds < 0) throw ValidationError("round count must be non-negative");

    const int k = gamma.size();
    std::vector<Rational> base_min(static_cast<std::size_t>(k));
    std::vector<Rational> probs(static_cast<std::size_t>(k));
    std::vector<double> base_min_d(static_cast<std::size_t>(k));
    std::vector<double> probs_d(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        base_min[size_t(j)] = gamma.budget(j);
        probs[size_t(j)] = gamma.probability(j);
        base_min_d[size_t(j)] = gamma.budget_value(j);
        probs_d[size_t(j)] = gamma.probability_value(j);
    }

    LedgerReport report;
    const Rational half_eps = eps / Rational(2);
    report.lambda = Rational(1) - half_eps;
    report.base_potential = potential(budget, gamma);
    report.rho = Rational(1) / report.base_potential - Rational(1);

    const double lambda_d = report.lambda.to_double();
    const double rho_d = report.rho.to_double();
    const double pot_d = report.base_potential.to_double();
    const double budget_d = budget.to_double();
    constexpr double kSlack = 1e-12;

    // smallest i with C_1 - rho * (1 - lambda^i) * B <= 0; infinite when the
    // limit C_1 - rho * B stays non-negative
    if (base_min.front() >= report.rho * budget) {
        report.bound_finite = false;
        report.o3_bound = -1;
    } else {
        report.bound_finite = true;
        double lam_pow = 1.0;
        long i = 0;
        while (base_min_d.front() - rho_d * (1.0 - lam_pow) * budget_d > 0.0 && i < 1'000'000) {
            lam_pow *= lambda_d;
            ++i;
        }
        report.o3_bound = i;
    }

    long simulate = rounds;
    if (report.bound_finite) simulate = std::min(simulate, report.o3_bound);

    // exact state, alive until a 128-bit overflow; double mirrors always kept
    bool exact_alive = true;
    Rational lam_pow(1);
    Rational max_budget = budget;
    std::vector<Rational> min_budgets = base_min;
    double lam_pow_d = 1.0;
    double max_budget_d = budget_d;
    std::vector<double> min_budgets_d = base_min_d;

    for (long i = 0; i < simulate; ++i) {
        LedgerRound row;
        row.index = int(i);

        Rational stake_max_r, stake_min_r, spent_bound_r, x_cum_r, y_cum_r;
        if (exact_alive) {
            try {
                stake_max_r = half_eps * lam_pow * budget;
                stake_min_r = report.rho * stake_max_r;
                spent_bound_r = report.rho * (Rational(1) - lam_pow) * budget;
                x_cum_r = (Rational(1) - lam_pow * report.lambda) * budget;
                y_cum_r = report.rho * x_cum_r;
            } catch (const RationalOverflow&) {
                exact_alive = false;
            }
        }

        double stake_max_d = 0.5 * eps.to_double() * lam_pow_d * budget_d;
        double stake_min_d = rho_d * stake_max_d;
        double spent_bound_d = rho_d * (1.0 - lam_pow_d) * budget_d;
        double x_cum_d = (1.0 - lam_pow_d * lambda_d) * budget_d;
        double y_cum_d = rho_d * x_cum_d;

        row.stake_exact = exact_alive;
        if (exact_alive) {
            row.stake_max = stake_max_r;
            row.stake_min = stake_min_r;
            row.budget_max = max_budget;
            row.min_budgets = min_budgets;

            // order comparisons never overflow, so these stay exact
            row.p2_ok = max_budget >= lam_pow * budget;
            row.p3_ok = true;
            for (int j = 0; j < k; ++j) {
                if (!(min_budgets[size_t(j)] <= base_min[size_t(j)] - spent_bound_r)) {
                    row.p3_ok = false;
                }
            }
            try {
                row.stake_ratio_ok =
                    stake_max_r / (stake_max_r + stake_min_r) == report.base_potential;
            } catch (const RationalOverflow&) {
                row.stake_exact = false;
                row.stake_ratio_ok =
                    std::abs(stake_max_d / (stake_max_d + stake_min_d) - pot_d) <= kSlack;
            }
        } else {
            row.stake_max = Rational::from_double(stake_max_d);
            row.stake_min = Rational::from_double(stake_min_d);
            row.budget_max = Rational::from_double(max_budget_d);
            for (int j = 0; j < k; ++j) {
                row.min_budgets.push_back(Rational::from_double(min_budgets_d[size_t(j)]));
            }
            row.p2_ok = max_budget_d >= lam_pow_d * budget_d - kSlack;
            row.p3_ok = true;
            for (int j = 0; j < k; ++j) {
                if (min_budgets_d[size_t(j)] > base_min_d[size_t(j)] - spent_bound_d + kSlack) {
                    row.p3_ok = false;
                }
            }
            row.stake_ratio_ok =
                std::abs(stake_max_d / (stake_max_d + stake_min_d) - pot_d) <= kSlack;
        }

        // potential sums overflow first; fall back per check
        row.exact = false;
        if (exact_alive) {
            try {
                Rational pot_now = potential_over(max_budget, min_budgets, probs);
                Rational pot_after =
                    potential_over(max_budget - stake_max_r, min_budgets, probs);
                row.potential_now = pot_now.to_double();
                row.p4_ok = pot_now >= report.base_potential;
                row.induction_ok = pot_after >= report.base_potential - half_eps;
                row.exact = true;
            } catch (const RationalOverflow&) {
                row.exact = false;
            }
        }
        if (!row.exact) {
            double pot_now = potential_over(max_budget_d, min_budgets_d, probs_d);
            row.potential_now = pot_now;
            row.p4_ok = pot_now >= pot_d - kSlack;
            double pot_after = potential_over(max_budget_d - stake_max_d, min_budgets_d, probs_d);
            row.induction_ok = pot_after >= pot_d - 0.5 * eps.to_double() - kSlack;
        }

        // convexity route behind the monotone potential: the cumulative-stake
        // identity plus Jensen's bound on the mixed ratios
        bool identity_ok;
        if (exact_alive) {
            try {
                identity_ok = report.base_potential * (x_cum_r + y_cum_r) == x_cum_r;
            } catch (const RationalOverflow&) {
                identity_ok = std::abs(pot_d * (x_cum_d + y_cum_d) - x_cum_d) <= kSlack;
            }
        } else {
            identity_ok = std::abs(pot_d * (x_cum_d + y_cum_d) - x_cum_d) <= kSlack;
        }
        double jensen_lhs = 0.0;
        for (int j = 0; j < k; ++j) {
            double r = budget_d / (budget_d + base_min_d[size_t(j)]);
            jensen_lhs +=
                probs_d[size_t(j)] * r * (budget_d - x_cum_d) / (budget_d - r * (x_cum_d + y_cum_d));
        }
        row.jensen_ok = identity_ok && jensen_lhs >= pot_d - kSlack;

        // worst case: both stakes are spent in full every round
        if (exact_alive) {
            try {
                max_budget -= stake_max_r;
                for (int j = 0; j < k; ++j) min_budgets[size_t(j)] -= stake_min_r;
                lam_pow *= report.lambda;
            } catch (const RationalOverflow&) {
                exact_alive = false;
            }
        }
        max_budget_d -= stake_max_d;
        for (int j = 0; j < k; ++j) min_budgets_d[size_t(j)] -= stake_min_d;
        lam_pow_d *= lambda_d;

        report.all_ok = report.all_ok && row.p2_ok && row.p3_ok && row.p4_ok &&
                        row.stake_ratio_ok && row.induction_ok && row.jensen_ok;
        report.rounds.push_back(std::move(row));
    }
    return report;
}

} // namespace bidding

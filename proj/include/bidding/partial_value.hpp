#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bidding/distribution.hpp"
#include "bidding/game.hpp"
#include "bidding/random_turn.hpp"

namespace bidding {

/// Full-information mean-payoff value at the given budget ratio, expressed
/// through the random-turn value at the mechanism's bias:
///   first-price Richman -> bias 0.5 (ratio-independent),
///   first-price poorman -> bias r,
///   all-pay poorman     -> bias (2r-1)/r for r > 0.5, else 0,
///   all-pay Richman     -> bias 0 (pure strategies cannot beat the floor).
double full_info_mean_payoff(const GameGraph& game, Mechanism mech, double ratio, double tol = 1e-9);

/// Segment bias induced by spending d of one's own budget against dc of the
/// opponent's. dc is positive by the distribution invariant.
double first_price_bias(double d, double dc);
double all_pay_bias(double d, double dc);

/// Access to bias -> random-turn value for the optimizer. Two-vertex
/// complete games use the exact affine closed form; everything else goes
/// through a sampled curve that can be re-sampled exactly near points of
/// interest.
class RtValueSource {
public:
    RtValueSource(const GameGraph& game, double tol, int grid_size = 33);

    double operator()(double bias) const;
    void refine_at(double bias);
    bool exact() const { return affine_; }

    std::function<double(double)> as_function() const;

private:
    const GameGraph* game_;
    double tol_;
    bool affine_ = false;
    double floor_ = 0.0;
    double spread_ = 0.0;
    std::optional<ValueCurve> curve_;
};

/// A candidate wallet cut sequence with its induced segment biases and
/// values. Admissible when the segment values are non-increasing (within a
/// 1e-9 band).
struct AdmissibilityReport {
    std::vector<double> xs;
    std::vector<double> biases;
    std::vector<double> ps;
    double value = 0.0;
    bool admissible = false;
};

AdmissibilityReport sequence_value(const std::function<double(double)>& rt_value,
                                   std::span<const double> xs, double budget,
                                   const BudgetDistribution& gamma, Mechanism mech);

struct OptimizeOptions {
    double tol = 1e-4;
    int grid = 512;
    int refine_passes = 2;
    double curve_tol = 1e-9;
};

struct OptimizeResult {
    double value = 0.0;
    std::vector<double> xs;
    std::vector<double> ps;
    double uncertainty = 0.0;
};

/// Best value over admissible wallet sequences: a grid DP over cumulative
/// budget cuts that tracks the segment-value floor, followed by refinement
/// passes that shrink the grid around the incumbent.
OptimizeResult optimize_partial_value(const GameGraph& game, double budget,
                                      const BudgetDistribution& gamma, Mechanism mech,
                                      const OptimizeOptions& options);
OptimizeResult optimize_partial_value(const GameGraph& game, double budget,
                                      const BudgetDistribution& gamma, Mechanism mech,
                                      double tol = 1e-4);

/// Pot(B, gamma) = sum_j gamma(C_j) * B / (B + C_j).
Rational potential(const Rational& budget, const BudgetDistribution& gamma);
double potential(double budget, const BudgetDistribution& gamma);

/// The fully-informed player's optimal value on the bowtie game equals the
/// potential; callers assert the bowtie context.
Rational bowtie_fully_informed_value(const Rational& budget, const BudgetDistribution& gamma);

struct ValueGap {
    double mp_down = 0.0;
    double mp_up = 0.0;
    double gap = 0.0;
    std::vector<double> xs;
};

/// Bowtie, first-price poorman: the partially-informed optimum, the
/// fully-informed optimum, and their difference. A positive gap certifies
/// that no pure-strategy value exists for that instance.
ValueGap value_gap_report(double budget, const BudgetDistribution& gamma, double tol = 1e-4);

/// One simulated round of the slow-spend/fast-spend budget schedule, with
/// every arithmetic consequence checked. `exact` is false when 128-bit
/// rationals overflowed and the round fell back to floating point.
struct LedgerRound {
    int index = 0;
    Rational stake_max;               // x_i
    Rational stake_min;               // y_i
    Rational budget_max;              // B_i before the round
    std::vector<Rational> min_budgets; // C_j^i before the round
    double potential_now = 0.0;
    bool p2_ok = false; // Max spends slowly: B_i >= lambda^i * B
    bool p3_ok = false; // Min spends fast: C_j^i <= C_j - rho * (1 - lambda^i) * B
    bool p4_ok = false; // the potential never drops below its starting value
    bool stake_ratio_ok = false; // x_i/(x_i+y_i) equals the base potential
    bool induction_ok = false;   // Pot(B_i - x_i, gamma_i) >= Pot - eps/2
    bool jensen_ok = false;      // convexity bound plus Pot*(x+y) = x
    bool exact = true;           // potential sums evaluated in exact arithmetic
    bool stake_exact = true;     // stake ratio and P2/P3 evaluated in exact arithmetic
};

struct LedgerReport {
    Rational lambda;
    Rational rho;
    Rational base_potential;
    long o3_bound = -1;
    bool bound_finite = false;
    std::vector<LedgerRound> rounds;
    bool all_ok = true;
};

/// Runs the schedule x_i = (eps/2) * lambda^i * B, y_i = rho * x_i against
/// the worst case where both stakes are spent every round, verifying the
/// slow-spend bound on Max, the fast-spend bound on Min, the monotone
/// potential, and the finite round bound.
LedgerReport check_potential_ledger(const Rational& budget, const BudgetDistribution& gamma,
                                    const Rational& eps, long rounds);

} // namespace bidding

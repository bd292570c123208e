#pragma once

#include <vector>

#include "bidding/distribution.hpp"
#include "bidding/game.hpp"

namespace bidding {

/// Per-vertex threshold ratio: the budget ratio above which the reaching
/// player wins the qualitative game from that vertex.
struct ThresholdMap {
    std::vector<double> values; // indexed by vertex, in [0,1]

    double at(int v) const { return values[size_t(v)]; }
};

/// Thresholds for first-price Richman reachability: one minus the uniform
/// random-turn reach probability at each vertex.
ThresholdMap threshold_reach_richman(const GameGraph& game);

/// Probability mass of budget pairs (B, C) with B/(B+C) strictly above the
/// threshold. Exact ties go to the opposing player. The double overload
/// resolves comparisons within 1e-12 of the threshold the same way.
Rational qualitative_partial_value(const Rational& threshold, const BudgetDistribution& beta,
                                   const BudgetDistribution& gamma);
double qualitative_partial_value(double threshold, const BudgetDistribution& beta,
                                 const BudgetDistribution& gamma);

/// Win probability recast as an expected payoff over {-1, +1}.
inline double expected_sign_payoff(double win_probability) { return 2.0 * win_probability - 1.0; }

} // namespace bidding

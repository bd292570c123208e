#include "bidding/threshold.hpp"

#include "bidding/random_turn.hpp"

namespace bidding {

ThresholdMap threshold_reach_richman(const GameGraph& game) {
    auto reach = random_turn_reach_probabilities(game, 0.5);
    ThresholdMap out;
    out.values.reserve(reach.size());
    for (double p : reach) out.values.push_back(1.0 - p);
    return out;
}

Rational qualitative_partial_value(const Rational& threshold, const BudgetDistribution& beta,
                                   const BudgetDistribution& gamma) {
    Rational mass;
    for (const auto& [own, own_prob] : beta.atoms()) {
        for (const auto& [other, other_prob] : gamma.atoms()) {
            if (Ratio::of(own, other).value > threshold) {
                mass += own_prob * other_prob;
            }
        }
    }
    return mass;
}

double qualitative_partial_value(double threshold, const BudgetDistribution& beta,
                                 const BudgetDistribution& gamma) {
    constexpr double kTieBand = 1e-12;
    double mass = 0.0;
    for (int i = 0; i < beta.size(); ++i) {
        for (int j = 0; j < gamma.size(); ++j) {
            double b = beta.budget_value(i);
            double c = gamma.budget_value(j);
            if (b == 0.0 && c == 0.0) throw ValidationError("ratio undefined for two zero budgets");
            double ratio = b / (b + c);
            if (ratio > threshold + kTieBand) {
                mass += beta.probability_value(i) * gamma.probability_value(j);
            }
        }
    }
    return mass;
}

} // namespace bidding

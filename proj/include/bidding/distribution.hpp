#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bidding/rational.hpp"

namespace bidding {

/// Finite-support probability distribution over initial budgets.
///
/// Atoms are stored with strictly increasing budgets; probabilities are
/// exact rationals summing to one. Immutable after construction.
class BudgetDistribution {
public:
    using Atom = std::pair<Rational, Rational>; // (budget, probability)

    static BudgetDistribution make(std::vector<Atom> pairs);
    static BudgetDistribution point(const Rational& budget);
    static BudgetDistribution uniform(std::vector<Rational> budgets);

    int size() const { return int(atoms_.size()); }
    const Rational& budget(int i) const { return atoms_[size_t(i)].first; }
    const Rational& probability(int i) const { return atoms_[size_t(i)].second; }
    std::span<const Atom> atoms() const { return atoms_; }

    double budget_value(int i) const { return atoms_[size_t(i)].first.to_double(); }
    double probability_value(int i) const { return atoms_[size_t(i)].second.to_double(); }

private:
    std::vector<Atom> atoms_;
};

/// Parses {"atoms": [[budget, prob], ...]}; string rationals like "1/3" accepted.
BudgetDistribution parse_distribution(std::string_view text);

std::string serialize(const BudgetDistribution& dist);

/// Parses CLI shorthand: "uniform:1,2", "point:5", inline JSON, or a file path.
BudgetDistribution parse_distribution_spec(std::string_view spec);

} // namespace bidding

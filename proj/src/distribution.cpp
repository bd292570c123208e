#include "bidding/distribution.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bidding/errors.hpp"

namespace bidding {

using nlohmann::json;

BudgetDistribution BudgetDistribution::make(std::vector<Atom> pairs) {
    if (pairs.empty()) throw ValidationError("budget distribution needs at least one atom");

    std::sort(pairs.begin(), pairs.end(),
              [](const Atom& a, const Atom& b) { return a.first < b.first; });

    Rational total;
    for (size_t i = 0; i < pairs.size(); ++i) {
        const auto& [budget, prob] = pairs[i];
        if (budget.is_negative()) throw ValidationError("budgets must be non-negative");
        if (!(prob > Rational(0)) || prob > Rational(1)) {
            throw ValidationError("atom probability must lie in (0,1]");
        }
        if (i > 0 && !(pairs[i - 1].first < budget)) {
            throw ValidationError("duplicate budget " + budget.to_string() + " in distribution");
        }
        total += prob;
    }
    if (total != Rational(1)) {
        throw ValidationError("probabilities sum to " + total.to_string() + ", expected 1");
    }

    BudgetDistribution dist;
    dist.atoms_ = std::move(pairs);
    return dist;
}

BudgetDistribution BudgetDistribution::point(const Rational& budget) {
    return make({{budget, Rational(1)}});
}

BudgetDistribution BudgetDistribution::uniform(std::vector<Rational> budgets) {
    if (budgets.empty()) throw ValidationError("uniform distribution needs at least one budget");
    Rational p(1, static_cast<long long>(budgets.size()));
    std::vector<Atom> atoms;
    atoms.reserve(budgets.size());
    for (auto& b : budgets) atoms.emplace_back(std::move(b), p);
    return make(std::move(atoms));
}

namespace {

Rational rational_from_json(const json& value) {
    if (value.is_string()) return Rational::parse(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long long>());
    if (value.is_number_float()) return Rational::from_double(value.get<double>());
    throw ValidationError("distribution entries must be numbers or rational strings");
}

} // namespace

BudgetDistribution parse_distribution(std::string_view text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ValidationError("malformed distribution JSON");
    if (!doc.is_object() || !doc.contains("atoms") || !doc["atoms"].is_array()) {
        throw ValidationError("distribution JSON needs an 'atoms' array");
    }
    std::vector<BudgetDistribution::Atom> atoms;
    for (const auto& a : doc["atoms"]) {
        if (!a.is_array() || a.size() != 2) {
            throw ValidationError("each atom must be a [budget, probability] pair");
        }
        atoms.emplace_back(rational_from_json(a[0]), rational_from_json(a[1]));
    }
    return BudgetDistribution::make(std::move(atoms));
}

std::string serialize(const BudgetDistribution& dist) {
    json atoms = json::array();
    for (const auto& [budget, prob] : dist.atoms()) {
        atoms.push_back(json::array({json(budget.to_string()), json(prob.to_string())}));
    }
    json doc;
    doc["atoms"] = std::move(atoms);
    return doc.dump(2);
}

BudgetDistribution parse_distribution_spec(std::string_view spec) {
    if (spec.rfind("point:", 0) == 0) {
        return BudgetDistribution::point(Rational::parse(spec.substr(6)));
    }
    if (spec.rfind("uniform:", 0) == 0) {
        std::vector<Rational> budgets;
        std::string rest(spec.substr(8));
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) budgets.push_back(Rational::parse(item));
        return BudgetDistribution::uniform(std::move(budgets));
    }
    if (!spec.empty() && spec.front() == '{') {
        return parse_distribution(spec);
    }
    std::ifstream in{std::string(spec)};
    if (!in) throw ValidationError("cannot open distribution file '" + std::string(spec) + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_distribution(buffer.str());
}

} // namespace bidding

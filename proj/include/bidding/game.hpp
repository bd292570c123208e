#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bidding/rational.hpp"

namespace bidding {

enum class Objective { MeanPayoff, Reachability };

enum class PriceRule { FirstPrice, AllPay };
enum class RecipientRule { Richman, Poorman };

/// Payment scheme: who pays (first-price vs all-pay) and who receives
/// (Richman: the opponent; poorman: the bank).
struct Mechanism {
    PriceRule price = PriceRule::FirstPrice;
    RecipientRule recipient = RecipientRule::Poorman;

    bool operator==(const Mechanism&) const = default;
};

Mechanism parse_mechanism(std::string_view text);
std::string to_string(Mechanism mech);

struct VertexSpec {
    std::string id;
    Rational weight;
    bool target = false;
};

/// Directed game graph with vertex weights.
///
/// Validated on construction: every vertex has a successor, edges connect
/// existing vertices, mean-payoff graphs are strongly connected and
/// reachability graphs have at least one target. Immutable afterwards, so
/// instances can be shared freely across threads.
class GameGraph {
public:
    static GameGraph make(Objective objective, std::vector<VertexSpec> vertices,
                          const std::vector<std::pair<std::string, std::string>>& edges);

    Objective objective() const { return objective_; }
    int vertex_count() const { return int(vertices_.size()); }

    const std::string& id(int v) const { return vertices_[size_t(v)].id; }
    const Rational& weight(int v) const { return vertices_[size_t(v)].weight; }
    double weight_value(int v) const { return weights_as_double_[size_t(v)]; }
    bool is_target(int v) const { return vertices_[size_t(v)].target; }

    std::span<const int> successors(int v) const { return successors_[size_t(v)]; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    int index_of(std::string_view id) const; // -1 when absent
    bool strongly_connected() const { return strongly_connected_; }
    bool has_edge(int from, int to) const;

    std::vector<int> targets() const;

private:
    GameGraph() = default;

    Objective objective_ = Objective::MeanPayoff;
    std::vector<VertexSpec> vertices_;
    std::vector<double> weights_as_double_;
    std::vector<std::vector<int>> successors_;
    std::vector<std::pair<int, int>> edges_;
    std::unordered_map<std::string, int> index_;
    bool strongly_connected_ = false;
};

/// Parses the JSON game format:
/// {"objective": "mean-payoff"|"reachability",
///  "vertices": [{"id": str, "weight": num-or-string-rational, "target": bool?}],
///  "edges": [[str, str], ...]}
GameGraph parse_game(std::string_view text);

/// Inverse of parse_game on validated graphs; rationals round-trip exactly.
std::string serialize(const GameGraph& game);

/// Whether every vertex can reach every other vertex.
bool is_strongly_connected(const std::vector<std::vector<int>>& successors);

/// Two vertices with weights 1 and 0 and all four directed edges.
GameGraph bowtie_game();

/// Budget ratio B/(B+C); undefined when both budgets are zero.
struct Ratio {
    Rational value;

    static Ratio of(const Rational& own, const Rational& other);
};

} // namespace bidding

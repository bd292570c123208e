#include "bidding/game.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace bidding {

using nlohmann::json;

Mechanism parse_mechanism(std::string_view text) {
    std::string t(text);
    std::replace(t.begin(), t.end(), '_', '-');
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (t == "first-price-richman") return {PriceRule::FirstPrice, RecipientRule::Richman};
    if (t == "first-price-poorman") return {PriceRule::FirstPrice, RecipientRule::Poorman};
    if (t == "all-pay-richman") return {PriceRule::AllPay, RecipientRule::Richman};
    if (t == "all-pay-poorman") return {PriceRule::AllPay, RecipientRule::Poorman};
    throw ValidationError("unknown mechanism '" + std::string(text) +
                          "' (expected e.g. first-price-poorman, all-pay-richman)");
}

std::string to_string(Mechanism mech) {
    std::string out = mech.price == PriceRule::FirstPrice ? "first-price-" : "all-pay-";
    out += mech.recipient == RecipientRule::Richman ? "richman" : "poorman";
    return out;
}

GameGraph GameGraph::make(Objective objective, std::vector<VertexSpec> vertices,
                          const std::vector<std::pair<std::string, std::string>>& edges) {
    GameGraph g;
    g.objective_ = objective;
    g.vertices_ = std::move(vertices);
    if (g.vertices_.empty()) throw ValidationError("game has no vertices");

    for (size_t i = 0; i < g.vertices_.size(); ++i) {
        auto [it, inserted] = g.index_.emplace(g.vertices_[i].id, int(i));
        if (!inserted) throw ValidationError("duplicate vertex id '" + g.vertices_[i].id + "'");
        g.weights_as_double_.push_back(g.vertices_[i].weight.to_double());
    }

    g.successors_.resize(g.vertices_.size());
    for (const auto& [from, to] : edges) {
        int u = g.index_of(from);
        int v = g.index_of(to);
        if (u < 0) throw ValidationError("edge references unknown vertex '" + from + "'");
        if (v < 0) throw ValidationError("edge references unknown vertex '" + to + "'");
        auto& succ = g.successors_[size_t(u)];
        if (std::find(succ.begin(), succ.end(), v) != succ.end()) {
            throw ValidationError("duplicate edge " + from + " -> " + to);
        }
        succ.push_back(v);
        g.edges_.emplace_back(u, v);
    }

    for (size_t v = 0; v < g.vertices_.size(); ++v) {
        if (g.successors_[v].empty()) {
            throw ValidationError("vertex '" + g.vertices_[v].id + "' has no successor");
        }
    }

    g.strongly_connected_ = is_strongly_connected(g.successors_);

    if (objective == Objective::MeanPayoff && !g.strongly_connected_) {
        throw ValidationError("mean-payoff game must be strongly connected");
    }
    if (objective == Objective::Reachability &&
        std::none_of(g.vertices_.begin(), g.vertices_.end(), [](const VertexSpec& s) { return s.target; })) {
        throw ValidationError("reachability game has no target vertex");
    }
    return g;
}

int GameGraph::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? -1 : it->second;
}

bool GameGraph::has_edge(int from, int to) const {
    auto succ = successors(from);
    return std::find(succ.begin(), succ.end(), to) != succ.end();
}

std::vector<int> GameGraph::targets() const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count(); ++v) {
        if (is_target(v)) out.push_back(v);
    }
    return out;
}

bool is_strongly_connected(const std::vector<std::vector<int>>& successors) {
    const size_t n = successors.size();
    if (n == 0) return false;

    // one forward and one reverse DFS from vertex 0
    std::vector<std::vector<int>> reversed(n);
    for (size_t u = 0; u < n; ++u) {
        for (int v : successors[u]) reversed[size_t(v)].push_back(int(u));
    }
    auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        size_t count = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[size_t(u)]) {
                if (!seen[size_t(v)]) {
                    seen[size_t(v)] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };
    return reaches_all(successors) && reaches_all(reversed);
}

namespace {

Rational rational_from_json(const json& value, const char* what) {
    if (value.is_string()) return Rational::parse(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long long>());
    if (value.is_number_float()) return Rational::from_double(value.get<double>());
    throw ValidationError(std::string(what) + " must be a number or a rational string");
}

json rational_to_json(const Rational& r) {
    if (r.is_integer() && abs(r) <= Rational(1LL << 62)) {
        return json(static_cast<long long>(r.num()));
    }
    return json(r.to_string());
}

} // namespace

GameGraph parse_game(std::string_view text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ValidationError("malformed game JSON");
    if (!doc.is_object()) throw ValidationError("game JSON must be an object");

    Objective objective;
    std::string obj = doc.value("objective", "");
    if (obj == "mean-payoff") {
        objective = Objective::MeanPayoff;
    } else if (obj == "reachability") {
        objective = Objective::Reachability;
    } else {
        throw ValidationError("objective must be 'mean-payoff' or 'reachability'");
    }

    if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
        throw ValidationError("game JSON needs a 'vertices' array");
    }
    std::vector<VertexSpec> vertices;
    for (const auto& v : doc["vertices"]) {
        if (!v.is_object() || !v.contains("id") || !v["id"].is_string()) {
            throw ValidationError("each vertex needs a string 'id'");
        }
        VertexSpec spec;
        spec.id = v["id"].get<std::string>();
        spec.weight = v.contains("weight") ? rational_from_json(v["weight"], "vertex weight") : Rational();
        spec.target = v.value("target", false);
        vertices.push_back(std::move(spec));
    }

    if (!doc.contains("edges") || !doc["edges"].is_array()) {
        throw ValidationError("game JSON needs an 'edges' array");
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
            throw ValidationError("each edge must be a [from, to] pair of vertex ids");
        }
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }

    return GameGraph::make(objective, std::move(vertices), edges);
}

std::string serialize(const GameGraph& game) {
    json doc;
    doc["objective"] = game.objective() == Objective::MeanPayoff ? "mean-payoff" : "reachability";
    doc["vertices"] = json::array();
    for (int v = 0; v < game.vertex_count(); ++v) {
        json jv;
        jv["id"] = game.id(v);
        jv["weight"] = rational_to_json(game.weight(v));
        if (game.is_target(v)) jv["target"] = true;
        doc["vertices"].push_back(std::move(jv));
    }
    doc["edges"] = json::array();
    for (const auto& [u, v] : game.edges()) {
        doc["edges"].push_back(json::array({game.id(u), game.id(v)}));
    }
    return doc.dump(2);
}

GameGraph bowtie_game() {
    return GameGraph::make(Objective::MeanPayoff,
                           {{"L", Rational(1), false}, {"R", Rational(0), false}},
                           {{"L", "L"}, {"L", "R"}, {"R", "L"}, {"R", "R"}});
}

Ratio Ratio::of(const Rational& own, const Rational& other) {
    if (own.is_negative() || other.is_negative()) throw ValidationError("budgets must be non-negative");
    if (own.is_zero() && other.is_zero()) throw ValidationError("ratio undefined for two zero budgets");
    return Ratio{own / (own + other)};
}

} // namespace bidding

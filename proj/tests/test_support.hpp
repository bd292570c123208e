#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bidding/game.hpp"

namespace bidding::testing {

inline GameGraph two_vertex_game(const Rational& w0, const Rational& w1) {
    return GameGraph::make(Objective::MeanPayoff, {{"a", w0, false}, {"b", w1, false}},
                           {{"a", "a"}, {"a", "b"}, {"b", "a"}, {"b", "b"}});
}

/// t2 - v0 - v1 - t1 with absorbing endpoints; t1 is the Max target.
inline GameGraph path_reach_game() {
    return GameGraph::make(Objective::Reachability,
                           {{"t2", Rational(0), false},
                            {"v0", Rational(0), false},
                            {"v1", Rational(0), false},
                            {"t1", Rational(0), true}},
                           {{"t2", "t2"},
                            {"v0", "t2"},
                            {"v0", "v1"},
                            {"v1", "v0"},
                            {"v1", "t1"},
                            {"t1", "t1"}});
}

inline GameGraph cycle_game(const std::vector<long long>& weights) {
    std::vector<VertexSpec> vertices;
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        vertices.push_back({"c" + std::to_string(i), Rational(weights[i]), false});
        edges.emplace_back("c" + std::to_string(i), "c" + std::to_string((i + 1) % weights.size()));
    }
    return GameGraph::make(Objective::MeanPayoff, std::move(vertices), edges);
}

/// Random strongly connected mean-payoff game: a spanning cycle plus extra
/// random edges, integer weights in [0, 9].
inline GameGraph random_strongly_connected_game(std::mt19937& rng, int n) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[std::size_t(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<VertexSpec> vertices;
    std::uniform_int_distribution<long long> weight(0, 9);
    for (int i = 0; i < n; ++i) {
        vertices.push_back({"v" + std::to_string(i), Rational(weight(rng)), false});
    }

    std::vector<std::pair<int, int>> edge_set;
    auto add_edge = [&](int u, int v) {
        for (auto [a, b] : edge_set) {
            if (a == u && b == v) return;
        }
        edge_set.emplace_back(u, v);
    };
    for (int i = 0; i < n; ++i) add_edge(order[std::size_t(i)], order[std::size_t((i + 1) % n)]);
    std::uniform_int_distribution<int> pick(0, n - 1);
    int extras = n;
    for (int e = 0; e < extras; ++e) add_edge(pick(rng), pick(rng));

    std::vector<std::pair<std::string, std::string>> edges;
    for (auto [u, v] : edge_set) {
        edges.emplace_back("v" + std::to_string(u), "v" + std::to_string(v));
    }
    return GameGraph::make(Objective::MeanPayoff, std::move(vertices), edges);
}

/// Independent oracle: optimal finite-horizon total reward of the
/// random-turn game divided by the horizon.
inline double rt_finite_horizon_average(const GameGraph& game, double p, int horizon) {
    const int n = game.vertex_count();
    std::vector<double> value(std::size_t(n), 0.0);
    std::vector<double> next(std::size_t(n), 0.0);
    for (int t = 0; t < horizon; ++t) {
        for (int v = 0; v < n; ++v) {
            double best = -1e300;
            double worst = 1e300;
            for (int u : game.successors(v)) {
                best = std::max(best, value[std::size_t(u)]);
                worst = std::min(worst, value[std::size_t(u)]);
            }
            next[std::size_t(v)] = game.weight_value(v) + p * best + (1.0 - p) * worst;
        }
        value.swap(next);
    }
    return value[0] / double(horizon);
}

/// Naive quadratic strong-connectivity check: BFS from every vertex.
inline bool naive_strongly_connected(const std::vector<std::vector<int>>& succ) {
    const int n = int(succ.size());
    for (int s = 0; s < n; ++s) {
        std::vector<char> seen(std::size_t(n), 0);
        std::vector<int> queue{s};
        seen[std::size_t(s)] = 1;
        int count = 1;
        while (!queue.empty()) {
            int u = queue.back();
            queue.pop_back();
            for (int v : succ[std::size_t(u)]) {
                if (!seen[std::size_t(v)]) {
                    seen[std::size_t(v)] = 1;
                    ++count;
                    queue.push_back(v);
                }
            }
        }
        if (count != n) return false;
    }
    return true;
}

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <typename F>
double golden_section_max(F f, double lo, double hi, double tol = 1e-10) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace bidding::testing

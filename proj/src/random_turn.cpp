#include "bidding/random_turn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "bidding/parallel.hpp"

namespace bidding {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_mean_payoff(const GameGraph& game) {
    if (game.objective() != Objective::MeanPayoff) {
        throw ValidationError("operation requires a mean-payoff game");
    }
    if (!game.strongly_connected()) {
        throw ValidationError("operation requires a strongly connected game");
    }
}

void require_bias(double bias) {
    if (!(bias >= 0.0 && bias <= 1.0)) {
        throw ValidationError("bias must lie in [0,1], got " + std::to_string(bias));
    }
}

// Karp's cycle-mean recurrence. Edge (u,v) carries w(u), so a cycle's edge
// sum equals the sum of its vertex weights.
double karp_max_cycle_mean(const GameGraph& game) {
    const int n = game.vertex_count();
    std::vector<std::vector<double>> best(size_t(n) + 1, std::vector<double>(size_t(n), -kInf));
    best[0][0] = 0.0;
    for (int k = 1; k <= n; ++k) {
        for (int u = 0; u < n; ++u) {
            if (best[size_t(k) - 1][size_t(u)] == -kInf) continue;
            double through = best[size_t(k) - 1][size_t(u)] + game.weight_value(u);
            for (int v : game.successors(u)) {
                best[size_t(k)][size_t(v)] = std::max(best[size_t(k)][size_t(v)], through);
            }
        }
    }
    double result = -kInf;
    for (int v = 0; v < n; ++v) {
        if (best[size_t(n)][size_t(v)] == -kInf) continue;
        double worst = kInf;
        for (int k = 0; k < n; ++k) {
            if (best[size_t(k)][size_t(v)] == -kInf) continue;
            worst = std::min(worst, (best[size_t(n)][size_t(v)] - best[size_t(k)][size_t(v)]) / double(n - k));
        }
        result = std::max(result, worst);
    }
    return result;
}

// Enumerates a pure stationary choice per vertex; next() steps through the
// product of successor lists in lexicographic order.
struct PolicyIterator {
    const GameGraph& game;
    std::vector<int> choice; // index into successors(v)

    explicit PolicyIterator(const GameGraph& g) : game(g), choice(size_t(g.vertex_count()), 0) {}

    int successor(int v) const { return game.successors(v)[size_t(choice[size_t(v)])]; }

    bool next() {
        for (int v = 0; v < game.vertex_count(); ++v) {
            if (++choice[size_t(v)] < int(game.successors(v).size())) return true;
            choice[size_t(v)] = 0;
        }
        return false;
    }
};

double policy_count(const GameGraph& game) {
    double count = 1.0;
    for (int v = 0; v < game.vertex_count(); ++v) count *= double(game.successors(v).size());
    return count;
}

// Long-run average reward of a finite Markov chain from vertex 0: stationary
// distributions on the closed classes, absorption-weighted on the rest.
double chain_gain(const Eigen::MatrixXd& P, const Eigen::VectorXd& w) {
    const int n = int(P.rows());

    // closed classes via repeated trimming: a state is transient if it can
    // reach a state outside every closed class candidate; at this scale a
    // simple fixed-point on "can leave" suffices.
    // Kosaraju-style SCC on the support graph.
    std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> pred(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (P(u, v) > 0.0) {
                succ[size_t(u)].push_back(v);
                pred[size_t(v)].push_back(u);
            }
        }
    }
    std::vector<int> order;
    std::vector<char> seen(size_t(n), 0);
    std::vector<std::pair<int, size_t>> stack;
    for (int s = 0; s < n; ++s) {
        if (seen[size_t(s)]) continue;
        stack.emplace_back(s, 0);
        seen[size_t(s)] = 1;
        while (!stack.empty()) {
            auto& [u, idx] = stack.back();
            if (idx < succ[size_t(u)].size()) {
                int v = succ[size_t(u)][idx++];
                if (!seen[size_t(v)]) {
                    seen[size_t(v)] = 1;
                    stack.emplace_back(v, 0);
                }
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }
    std::vector<int> component(size_t(n), -1);
    int comp_count = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (component[size_t(*it)] != -1) continue;
        std::vector<int> dfs{*it};
        component[size_t(*it)] = comp_count;
        while (!dfs.empty()) {
            int u = dfs.back();
            dfs.pop_back();
            for (int v : pred[size_t(u)]) {
                if (component[size_t(v)] == -1) {
                    component[size_t(v)] = comp_count;
                    dfs.push_back(v);
                }
            }
        }
        ++comp_count;
    }
    std::vector<char> closed(size_t(comp_count), 1);
    for (int u = 0; u < n; ++u) {
        for (int v : succ[size_t(u)]) {
            if (component[size_t(u)] != component[size_t(v)]) closed[size_t(component[size_t(u)])] = 0;
        }
    }

    Eigen::VectorXd gain = Eigen::VectorXd::Zero(n);
    std::vector<char> resolved(size_t(n), 0);
    for (int c = 0; c < comp_count; ++c) {
        if (!closed[size_t(c)]) continue;
        std::vector<int> members;
        for (int v = 0; v < n; ++v) {
            if (component[size_t(v)] == c) members.push_back(v);
        }
        const int m = int(members.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) A(i, j) = P(members[size_t(j)], members[size_t(i)]);
            A(i, i) -= 1.0;
        }
        A.row(m - 1).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
        b(m - 1) = 1.0;
        Eigen::VectorXd pi = A.fullPivLu().solve(b);
        double g = 0.0;
        for (int i = 0; i < m; ++i) g += pi(i) * w(members[size_t(i)]);
        for (int v : members) {
            gain(v) = g;
            resolved[size_t(v)] = 1;
        }
    }

    std::vector<int> transient;
    for (int v = 0; v < n; ++v) {
        if (!resolved[size_t(v)]) transient.push_back(v);
    }
    if (!transient.empty()) {
        const int m = int(transient.size());
        Eigen::MatrixXd IQ = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) IQ(i, j) = (i == j ? 1.0 : 0.0) - P(transient[size_t(i)], transient[size_t(j)]);
            for (int v = 0; v < n; ++v) {
                if (resolved[size_t(v)]) r(i) += P(transient[size_t(i)], v) * gain(v);
            }
        }
        Eigen::VectorXd h = IQ.fullPivLu().solve(r);
        for (int i = 0; i < m; ++i) gain(transient[size_t(i)]) = h(i);
    }
    return gain(0);
}

// Exact value by enumerating pure stationary strategy pairs. Both players
// have optimal pure stationary strategies here, so max-min over pairs is the
// game value; only viable at small policy counts.
double enumerate_policies(const GameGraph& game, double bias) {
    const int n = game.vertex_count();
    Eigen::VectorXd w(n);
    for (int v = 0; v < n; ++v) w(v) = game.weight_value(v);

    double best_for_max = -kInf;
    PolicyIterator f(game);
    do {
        double worst = kInf;
        PolicyIterator g(game);
        do {
            Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
            for (int v = 0; v < n; ++v) {
                P(v, f.successor(v)) += bias;
                P(v, g.successor(v)) += 1.0 - bias;
            }
            worst = std::min(worst, chain_gain(P, w));
        } while (g.next());
        best_for_max = std::max(best_for_max, worst);
    } while (f.next());
    return best_for_max;
}

} // namespace

StochasticGame build_random_turn(const GameGraph& game, double bias) {
    require_bias(bias);
    StochasticGame rt;
    rt.bias = bias;
    rt.source_count = game.vertex_count();
    rt.weights.resize(size_t(3 * game.vertex_count()));
    rt.choice_targets.resize(size_t(3 * game.vertex_count()));
    for (int v = 0; v < game.vertex_count(); ++v) {
        double w = game.weight_value(v);
        rt.weights[size_t(StochasticGame::nature(v))] = w;
        rt.weights[size_t(StochasticGame::max_copy(v))] = w;
        rt.weights[size_t(StochasticGame::min_copy(v))] = w;
        std::vector<int> targets;
        targets.reserve(game.successors(v).size());
        for (int u : game.successors(v)) targets.push_back(StochasticGame::nature(u));
        rt.choice_targets[size_t(StochasticGame::max_copy(v))] = targets;
        rt.choice_targets[size_t(StochasticGame::min_copy(v))] = std::move(targets);
    }
    return rt;
}

double max_cycle_mean(const GameGraph& game) {
    require_mean_payoff(game);
    return karp_max_cycle_mean(game);
}

double min_cycle_mean(const GameGraph& game) {
    require_mean_payoff(game);
    // negate weights and reuse the max recurrence
    std::vector<VertexSpec> flipped;
    std::vector<std::pair<std::string, std::string>> edges;
    for (int v = 0; v < game.vertex_count(); ++v) {
        flipped.push_back({game.id(v), -game.weight(v), false});
    }
    for (const auto& [u, v] : game.edges()) edges.emplace_back(game.id(u), game.id(v));
    GameGraph negated = GameGraph::make(Objective::MeanPayoff, std::move(flipped), edges);
    return -karp_max_cycle_mean(negated);
}

MeanPayoffSolution solve_random_turn_mean_payoff(const GameGraph& game, double bias,
                                                 const MeanPayoffOptions& options) {
    require_mean_payoff(game);
    require_bias(bias);
    if (!(options.tol > 0.0)) throw ValidationError("tolerance must be positive");

    MeanPayoffSolution out;
    if (bias == 0.0) {
        out.value = min_cycle_mean(game);
        return out;
    }
    if (bias == 1.0) {
        out.value = max_cycle_mean(game);
        return out;
    }

    const int n = game.vertex_count();
    const double alpha = options.damping;
    Eigen::VectorXd value = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd applied(n);

    double span = kInf;
    long iter = 0;
    while (iter < options.max_operator_applications) {
        ++iter;
        for (int v = 0; v < n; ++v) {
            double best = -kInf;
            double worst = kInf;
            for (int u : game.successors(v)) {
                best = std::max(best, value(u));
                worst = std::min(worst, value(u));
            }
            applied(v) = game.weight_value(v) + bias * best + (1.0 - bias) * worst;
        }
        Eigen::VectorXd damped = (1.0 - alpha) * value + alpha * applied;
        Eigen::VectorXd diff = damped - value;
        double hi = diff.maxCoeff();
        double lo = diff.minCoeff();
        span = hi - lo;
        if (span <= alpha * options.tol) {
            out.value = (hi + lo) / (2.0 * alpha);
            out.iterations = iter;
            out.residual = span / alpha;
            return out;
        }
        value = damped.array() - damped(0);
    }

    if (policy_count(game) * policy_count(game) <= 1e6) {
        out.value = enumerate_policies(game, bias);
        out.iterations = iter;
        out.residual = span / alpha;
        out.used_policy_fallback = true;
        return out;
    }
    throw SolverError("random-turn mean-payoff iteration did not converge", span / alpha);
}

double random_turn_mean_payoff(const GameGraph& game, double bias, double tol) {
    MeanPayoffOptions options;
    options.tol = tol;
    return solve_random_turn_mean_payoff(game, bias, options).value;
}

std::vector<double> random_turn_reach_probabilities(const GameGraph& game, double bias) {
    if (game.objective() != Objective::Reachability) {
        throw ValidationError("operation requires a reachability game");
    }
    require_bias(bias);

    const int n = game.vertex_count();
    std::vector<double> prob(size_t(n), 0.0);
    for (int v = 0; v < n; ++v) {
        if (game.is_target(v)) prob[size_t(v)] = 1.0;
    }

    constexpr double kResidual = 1e-12;
    constexpr long kCap = 10'000'000;
    std::vector<double> next(static_cast<std::size_t>(n));
    for (long iter = 0; iter < kCap; ++iter) {
        double residual = 0.0;
        for (int v = 0; v < n; ++v) {
            if (game.is_target(v)) {
                next[size_t(v)] = 1.0;
                continue;
            }
            double best = 0.0;
            double worst = 1.0;
            for (int u : game.successors(v)) {
                best = std::max(best, prob[size_t(u)]);
                worst = std::min(worst, prob[size_t(u)]);
            }
            next[size_t(v)] = bias * best + (1.0 - bias) * worst;
            residual = std::max(residual, std::abs(next[size_t(v)] - prob[size_t(v)]));
        }
        prob.swap(next);
        if (residual < kResidual) return prob;
    }
    throw SolverError("reachability value iteration did not converge", 1.0);
}

ValueCurve::ValueCurve(std::vector<double> biases, std::vector<double> values, double tol)
    : biases_(std::move(biases)), values_(std::move(values)), tol_(tol) {
    if (biases_.size() != values_.size() || biases_.size() < 2) {
        throw ValidationError("value curve needs matching bias/value samples, at least two");
    }
    if (!std::is_sorted(biases_.begin(), biases_.end())) {
        throw ValidationError("value curve biases must be increasing");
    }
    clamp_monotone();
}

void ValueCurve::clamp_monotone() {
    for (size_t i = 1; i < values_.size(); ++i) {
        if (values_[i] < values_[i - 1]) {
            max_violation_ = std::max(max_violation_, values_[i - 1] - values_[i]);
            values_[i] = values_[i - 1];
        }
    }
}

double ValueCurve::eval(double bias) const {
    if (bias <= biases_.front()) return values_.front();
    if (bias >= biases_.back()) return values_.back();
    auto it = std::upper_bound(biases_.begin(), biases_.end(), bias);
    size_t hi = size_t(it - biases_.begin());
    size_t lo = hi - 1;
    double width = biases_[hi] - biases_[lo];
    if (width <= 0.0) return values_[lo];
    double t = (bias - biases_[lo]) / width;
    return values_[lo] + t * (values_[hi] - values_[lo]);
}

void ValueCurve::insert(double bias, double value) {
    auto it = std::lower_bound(biases_.begin(), biases_.end(), bias);
    size_t pos = size_t(it - biases_.begin());
    if (pos < biases_.size() && std::abs(biases_[pos] - bias) < 1e-12) {
        values_[pos] = value;
    } else {
        biases_.insert(it, bias);
        values_.insert(values_.begin() + long(pos), value);
    }
    clamp_monotone();
}

ValueCurve value_curve(const GameGraph& game, int grid_size, double tol) {
    if (grid_size < 2) throw ValidationError("curve grid size must be at least 2");
    require_mean_payoff(game);

    std::vector<double> biases(static_cast<std::size_t>(grid_size));
    std::vector<double> values(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) biases[size_t(i)] = double(i) / double(grid_size - 1);
    biases.front() = 0.0;
    biases.back() = 1.0;

    values.front() = min_cycle_mean(game);
    values.back() = max_cycle_mean(game);
    parallel_for(grid_size - 2, [&](int i) {
        values[size_t(i) + 1] = random_turn_mean_payoff(game, biases[size_t(i) + 1], tol);
    });

    ValueCurve curve(std::move(biases), std::move(values), tol);

    // split the steepest interval until no jump dominates, within a budget
    double spread = curve.values().back() - curve.values().front();
    double threshold = std::max(4.0 * tol, 2.0 * spread / double(grid_size - 1));
    int budget = 3 * grid_size;
    while (budget-- > 0) {
        auto grid = curve.grid();
        auto vals = curve.values();
        double worst = threshold;
        size_t at = 0;
        for (size_t i = 1; i < grid.size(); ++i) {
            double jump = vals[i] - vals[i - 1];
            if (jump > worst) {
                worst = jump;
                at = i;
            }
        }
        if (at == 0) break;
        double mid = 0.5 * (grid[at - 1] + grid[at]);
        curve.insert(mid, random_turn_mean_payoff(game, mid, tol));
    }
    return curve;
}

} // namespace bidding

#pragma once

#include <span>
#include <vector>

#include "bidding/game.hpp"

namespace bidding {

/// Random-turn game built from a bidding game: every source vertex v yields a
/// nature vertex, a Max copy and a Min copy. Nature branches to the two
/// copies with probability (bias, 1-bias); each copy moves to the nature
/// vertex of any successor of v. All three inherit the weight of v.
///
/// Vertex layout: nature(v) = 3v, max_copy(v) = 3v+1, min_copy(v) = 3v+2.
struct StochasticGame {
    double bias = 0.5;
    std::vector<double> weights;                  // size 3 * source_count
    std::vector<std::vector<int>> choice_targets; // per copy vertex, nature targets; empty for nature vertices
    int source_count = 0;

    static int nature(int v) { return 3 * v; }
    static int max_copy(int v) { return 3 * v + 1; }
    static int min_copy(int v) { return 3 * v + 2; }
    int vertex_count() const { return 3 * source_count; }
};

StochasticGame build_random_turn(const GameGraph& game, double bias);

/// Maximum / minimum mean weight over all cycles (vertex weights averaged
/// along the cycle). Requires a strongly connected graph.
double max_cycle_mean(const GameGraph& game);
double min_cycle_mean(const GameGraph& game);

struct MeanPayoffOptions {
    double tol = 1e-9;
    long max_operator_applications = 10'000'000;
    double damping = 0.5; // aperiodicity transform weight on the fresh operator value
};

struct MeanPayoffSolution {
    double value = 0.0;
    long iterations = 0;
    double residual = 0.0;
    bool used_policy_fallback = false;
};

/// Value of the random-turn mean-payoff game with the given Max bias.
///
/// Interior biases run damped relative value iteration on the one-step
/// operator T(V)(v) = w(v) + p * max_u V(u) + (1-p) * min_u V(u); iteration
/// stops once the span seminorm of the damped Bellman residual certifies the
/// value within tol. The biases 0 and 1 reduce to deterministic cycle means.
/// If the iteration cap is hit, optimal pure stationary strategies are
/// enumerated exactly (both players have them in this game class); failing
/// that, SolverError carries the residual.
MeanPayoffSolution solve_random_turn_mean_payoff(const GameGraph& game, double bias,
                                                 const MeanPayoffOptions& options);
double random_turn_mean_payoff(const GameGraph& game, double bias, double tol = 1e-9);

/// Optimal probability of reaching a target from each vertex in the
/// random-turn game (least fixpoint; value iteration from zero, residual
/// below 1e-12). Targets map to 1.
std::vector<double> random_turn_reach_probabilities(const GameGraph& game, double bias);

/// Sampled map bias -> random-turn mean-payoff value with monotone
/// piecewise-linear interpolation between samples.
class ValueCurve {
public:
    ValueCurve(std::vector<double> biases, std::vector<double> values, double tol);

    double eval(double bias) const;
    void insert(double bias, double value);

    std::span<const double> grid() const { return biases_; }
    std::span<const double> values() const { return values_; }
    double tolerance() const { return tol_; }
    double max_monotonicity_violation() const { return max_violation_; }

private:
    void clamp_monotone();

    std::vector<double> biases_;
    std::vector<double> values_;
    double tol_ = 1e-9;
    double max_violation_ = 0.0;
};

/// Builds a curve on a uniform bias grid, refined adaptively where the slope
/// is large. Endpoints are the exact cycle-mean anchors. Grid points are
/// evaluated concurrently and merged by index.
ValueCurve value_curve(const GameGraph& game, int grid_size, double tol = 1e-9);

} // namespace bidding

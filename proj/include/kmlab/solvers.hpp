#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kmlab/models.hpp"

namespace kmlab {

/// Smallest H >= 0 such that the discounted tail past stage H is within tol:
/// cost_sup * beta^(H+1) / (1 - beta) <= tol.
int truncation_horizon(double cost_sup, double beta, double tol);

// ------------------------------------------------------------------ tabular MDP

/// Deterministic stationary policy: state index -> action index.
struct StationaryPolicy {
    std::vector<int> action;
};

struct ValueIterationResult {
    std::vector<double> value;
    StationaryPolicy policy;        // greedy w.r.t. value, ties to lowest index
    int iterations = 0;
    double certified_error = 0.0;   // sup-norm distance bound to the fixed point
    std::vector<double> gaps;       // successive iterate gaps, one per iteration
    std::string to_json() const;
};

/// Value iteration on the discounted-cost optimality operator, run until the
/// successive-iterate gap is at most tol(1-beta)/beta (or the a-priori
/// iteration bound is hit), which certifies a sup-norm error of at most tol.
ValueIterationResult value_iterate(const TabularMDP& m, double tol);

/// Exact policy value: solves (I - beta P_pi) v = c_pi by Gaussian elimination
/// with partial pivoting and verifies the residual to 1e-10.
std::vector<double> evaluate_policy_exact(const TabularMDP& m, const StationaryPolicy& pi);

/// sum_x dist(x) v(x) — the discounted cost from an initial distribution.
double expected_value(const std::vector<double>& dist, const std::vector<double>& v);

// ---------------------------------------------------------------- region models

/// One stage of a region policy: a partition of the state interval with an
/// action value per cell (points dominate intervals, as in RegionModel).
struct RegionPolicyStep {
    std::vector<Region> regions;
    std::vector<double> actions;

    int region_of(double x) const;
};

/// Piecewise-constant policy schedule: step t uses schedule[min(t, size-1)],
/// so a single step is a stationary policy and a longer schedule expresses the
/// open-loop time-dependent policies of the gallery.
struct RegionPolicy {
    std::vector<RegionPolicyStep> schedule;

    static RegionPolicy stationary(RegionPolicyStep step) {
        return RegionPolicy{{std::move(step)}};
    }
};

struct RegionEvalResult {
    double value = 0.0;
    int horizon = 0;          // stages 0..horizon were evaluated exactly
    double tail_bound = 0.0;  // certified truncation error (<= tol)
    std::string to_json() const;
};

/// J = sum_t beta^t int c(x, pi_t(x)) mu_t(dx) by exact forward propagation of
/// the state distribution (kernels are region-constant, so the propagation is
/// closed-form), truncated with a certified tail bound <= tol.
RegionEvalResult evaluate_region_policy(const RegionModel& m, const RegionPolicy& pi, double tol);

// --------------------------------------------------------------------- POMDPs

/// Finite-horizon deterministic history policy: a complete decision tree over
/// observation strings. actions are stored in level order for histories
/// (y_0..y_t) with t < levels; histories beyond the tree take default_action.
struct HistoryPolicy {
    int n_obs = 1;
    int levels = 0;
    std::vector<int> actions;
    int default_action = 0;

    static std::size_t tree_size(int n_obs, int levels);
    static HistoryPolicy constant(int n_obs, int levels, int action);
    /// Uniformly random actions at every node.
    static HistoryPolicy random(int n_obs, int levels, int n_actions, SplitMix64& rng);

    int action_at(const std::vector<int>& obs_history) const;
    /// Index into actions for a history (length 1..levels).
    std::size_t node_index(const std::vector<int>& obs_history) const;
};

struct BeliefSolveOptions {
    double tol = 1e-6;
    std::size_t node_budget = 2'000'000;         // distinct (stage, belief) nodes
    std::size_t policy_node_budget = 300'000;    // cap for the materialized tree
};

struct BeliefSolveResult {
    double value = 0.0;
    HistoryPolicy policy;
    int horizon = 0;
    int policy_levels = 0;      // depth to which the optimal tree was materialized
    std::size_t node_count = 0;
    double tail_bound = 0.0;
    std::string to_json() const;
};

/// Epsilon-exact POMDP solve: exact finite-horizon dynamic programming over
/// reachable beliefs (deduplicated by rounding to 1e-10) with the discounted
/// tail bounded by tol. Throws if the node budget is exceeded, reporting the
/// required horizon and the budget.
BeliefSolveResult solve_pomdp_belief_tree(const TabularPOMDP& m,
                                          const BeliefSolveOptions& opt = {});

struct HistoryEvalResult {
    double value = 0.0;
    int horizon = 0;
    std::size_t node_count = 0;
    double tail_bound = 0.0;
    bool used_default_action = false;   // the walk ran past the policy's depth
    std::string to_json() const;
};

/// Exact expected discounted cost of a history policy: enumerates the finite
/// strategic measure over observation histories to the tol-horizon, pruning
/// zero-probability branches.
HistoryEvalResult evaluate_history_policy(const TabularPOMDP& m, const HistoryPolicy& pi,
                                          double tol, std::size_t node_budget = 20'000'000);

/// Exact truncated value sum_{t=0}^{horizon} beta^t E[c] of a history policy
/// (no tail accounting; used by the sup-over-policies enumeration).
double history_policy_truncated_value(const TabularPOMDP& m, const HistoryPolicy& pi,
                                      int horizon);

} // namespace kmlab

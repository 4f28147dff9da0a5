#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmlab/gallery.hpp"
#include "kmlab/models.hpp"
#include "kmlab/solvers.hpp"

namespace kmlab {

/// One mismatch experiment: a policy designed for an incorrect model applied
/// to the true one, together with the kernel distances and the bound values
/// that the inequality checks consume. CSV column order is fixed (see
/// csv_header) and documented in the README.
struct MismatchRecord {
    std::string true_id;
    std::string design_id;
    double beta = 0.0;
    double kernel_tv_sup = 0.0;
    double kernel_w1_sup = 0.0;
    double j_opt_true = 0.0;
    double j_opt_design = 0.0;
    double j_cross = 0.0;
    double loss = 0.0;             // j_cross - j_opt_true
    double continuity_bound = 0.0;
    double robustness_bound = 0.0;
    bool bound_holds = false;      // loss <= robustness_bound + 4 * tol
    double tol = 0.0;
    std::string policy_provenance; // "value_iteration", "analytic", "belief_tree"

    static std::string csv_header();
    std::string csv_row() const;
    std::string to_jsonl() const;
};

/// Continuity bound: |J*(T_n) - J*(T)| <= ||c||_inf beta/(1-beta)^2 sup TV.
double continuity_bound(const TabularMDP& a, const TabularMDP& b);
double continuity_bound(const RegionModel& a, const RegionModel& b);

/// Robustness bound: mismatch loss <= 2 ||c||_inf beta/(1-beta)^2 sup TV.
double robustness_bound(const TabularMDP& a, const TabularMDP& b);
double robustness_bound(const RegionModel& a, const RegionModel& b);

/// Full mismatch experiment on tabular models: value-iterate both, cross-apply
/// the design policy via exact policy evaluation.
MismatchRecord mismatch_loss(const TabularMDP& truth, const TabularMDP& design, double tol);

/// Gallery mismatch: evaluates the entry's analytic policies with the region
/// solver (policy provenance "analytic").
MismatchRecord mismatch_loss(const GalleryEntry& entry, double tol);

/// POMDP mismatch via the belief-tree solver; the design policy tree is
/// cross-applied with evaluate_history_policy.
MismatchRecord mismatch_loss(const TabularPOMDP& truth, const TabularPOMDP& design,
                             const BeliefSolveOptions& opt);

// ------------------------------------------------------- strategic measure TV

struct StrategicTvResult {
    double exact_tv = 0.0;   // sum over trajectories (x,y)_{0..k} of |p1 - p2|
    double sup_tv = 0.0;     // sup-cell kernel TV between the two models
    double bound = 0.0;      // k * sup_tv
    bool holds = false;      // exact_tv <= bound + 1e-10
};

/// Exact total variation between the strategic measures induced on
/// trajectories up to time k by a common policy, prior, and channel but
/// different kernels. Throws if priors/channels differ or the trajectory
/// count exceeds the budget.
StrategicTvResult strategic_tv(const TabularPOMDP& p1, const TabularPOMDP& p2,
                               const HistoryPolicy& pi, int k,
                               std::size_t trajectory_budget = 50'000'000);

// ------------------------------------------------------------ sup over policies

struct SupGapResult {
    double gap = 0.0;                 // max over policies of |J1_H - J2_H|
    double tail_bound = 0.0;          // ||c|| beta^{H+1}/(1-beta)
    std::size_t policies = 0;
    int horizon = 0;
};

/// Exhaustive maximum of the truncated-cost difference over every
/// deterministic depth-H history policy (tiny instances only; throws when the
/// policy count exceeds the budget).
SupGapResult policy_sup_gap(const TabularPOMDP& p1, const TabularPOMDP& p2, int horizon,
                            std::size_t policy_budget = 100'000);

// ------------------------------------------------------------- random corpora

/// Random tabular MDP: uniform-normalized kernel rows, costs in [0,1], random
/// normalized prior, one-dimensional state labels 0..nx-1.
TabularMDP make_random_mdp(int nx, int nu, double beta, SplitMix64& rng);

/// Convex mixing toward fresh random rows: T2 = (1-eps) T1 + eps R, which
/// keeps sup TV analytically controlled (<= 2 eps, exactly eps * max tv(T1, R)).
TabularMDP mix_kernel_toward_random(const TabularMDP& base, double eps, SplitMix64& rng);

/// Row-wise convex combination of two kernels over a shared frame:
/// (1-eps) a + eps b (costs, prior, labels taken from a). Used to walk a
/// fixed mixing ray as eps -> 0.
TabularMDP mix_kernels(const TabularMDP& a, const TabularMDP& b, double eps);

/// Random POMDP with a random row-stochastic channel.
TabularPOMDP make_random_pomdp(int nx, int nu, int ny, double beta, SplitMix64& rng);

/// Same prior and channel as base, kernel mixed toward fresh random rows.
TabularPOMDP mix_pomdp_kernel(const TabularPOMDP& base, double eps, SplitMix64& rng);

} // namespace kmlab

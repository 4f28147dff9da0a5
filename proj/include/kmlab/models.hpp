#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmlab/measure.hpp"

namespace kmlab {

/// Tolerance for stochasticity checks (row sums, channel rows, priors).
inline constexpr double kStochasticTol = 1e-12;

// ------------------------------------------------------------- tabular models

/// Finite controlled Markov model. kernel[x][u] is the probability row over
/// next states; cost[x][u] >= 0; discount in (0,1); initial is a probability
/// row over states. state_labels carry the real-valued embedding of each
/// state (one or two coordinates).
struct TabularMDP {
    std::vector<std::vector<double>> state_labels;
    std::vector<double> action_labels;
    std::vector<std::vector<std::vector<double>>> kernel;
    std::vector<std::vector<double>> cost;
    double discount = 0.5;
    std::vector<double> initial;

    int n_states() const { return static_cast<int>(kernel.size()); }
    int n_actions() const { return kernel.empty() ? 0 : static_cast<int>(kernel[0].size()); }
    double cost_sup() const;
};

struct TabularPOMDP {
    TabularMDP mdp;
    std::vector<std::vector<double>> channel;   // Q[x][y], row-stochastic
    bool uninformative = false;                 // single collapsed observation

    int n_obs() const { return channel.empty() ? 0 : static_cast<int>(channel[0].size()); }
};

/// POMDP with the identity channel Q(y|x) = 1{y = x}.
TabularPOMDP as_pomdp(const TabularMDP& m);
/// POMDP whose single observation carries no information.
TabularPOMDP uninformative_pomdp(const TabularMDP& m);

// -------------------------------------------------------------- region models

/// One cell of a finite state-interval partition: a union of half-open
/// intervals [a, b) plus explicitly listed points. Points dominate intervals
/// across the whole partition, which is how boundary conventions like
/// "1 belongs to R" are expressed.
struct Region {
    std::string name;
    std::vector<std::pair<double, double>> intervals;
    std::vector<double> points;
};

enum class ChannelTag { Full, Uninformative };

/// Stage cost of a region model: either one piecewise polynomial per grid
/// action, or the tracking cost (x-u)^2 for arbitrary action values.
struct CostSpec {
    enum class Kind { PerAction, SquaredError };
    Kind kind = Kind::SquaredError;
    std::vector<PiecewisePoly> per_action;

    static CostSpec squared_error() { return CostSpec{Kind::SquaredError, {}}; }
    static CostSpec per_action_polys(std::vector<PiecewisePoly> polys) {
        return CostSpec{Kind::PerAction, std::move(polys)};
    }

    /// Cost as a function of x for a fixed action (by grid index and value).
    PiecewisePoly for_action(int action_index, double action_value,
                             double state_lo, double state_hi) const;
    /// sup |c| over the state interval and the given action values.
    double sup_norm(double state_lo, double state_hi,
                    const std::vector<double>& action_values) const;
};

/// Declared (not verified) satisfaction of the standard regularity items:
/// weakly continuous kernel, TV-continuous channel, continuous bounded cost,
/// compact action set.
struct AssumptionProfile {
    bool weakly_continuous_kernel = false;
    bool tv_continuous_channel = false;
    bool continuous_bounded_cost = false;
    bool compact_actions = false;
    std::string note;
};

/// Continuous-state controlled model whose kernel depends on the state only
/// through the region partition. kernel[r][a] is a probability Measure1D;
/// models with action-independent dynamics store a single column and accept
/// any action value in policies.
struct RegionModel {
    std::string name;
    double state_lo = 0.0, state_hi = 1.0;
    std::vector<Region> regions;
    std::vector<double> action_values;                       // finite grid; may be empty if
    std::optional<std::pair<double, double>> action_interval; // only an interval is declared
    std::vector<std::vector<Measure1D>> kernel;              // [region][action column]
    CostSpec cost;
    double discount = 0.5;
    Measure1D initial;
    ChannelTag channel_tag = ChannelTag::Full;
    AssumptionProfile assumption_profile;

    int n_regions() const { return static_cast<int>(regions.size()); }
    bool action_independent() const { return !kernel.empty() && kernel[0].size() == 1; }
    /// Region owning x: listed points first, then intervals. -1 if uncovered.
    int region_of(double x) const;
    /// Grid index of an action value (-1 when no grid is declared, which is
    /// only legal for action-independent kernels with squared-error cost).
    /// Throws if a grid exists but the value is not on it.
    int action_index(double action_value) const;
    double cost_sup() const;
    /// All partition breakpoints: interval endpoints, listed points, and the
    /// state interval ends.
    std::vector<double> breakpoints() const;
};

// ------------------------------------------------------- additive-noise model

/// x_{t+1} = f(x_t, u_t) + w_t on a bounded state interval with a finite
/// action grid; drift[a] is f(., u_a) as a piecewise polynomial.
struct AdditiveNoiseModel {
    double state_lo = 0.0, state_hi = 1.0;
    std::vector<double> action_values;
    std::vector<PiecewisePoly> drift;
    Measure1D noise;

    double drift_at(double x, int action_index) const { return drift[action_index].eval(x); }
    int n_actions() const { return static_cast<int>(action_values.size()); }
};

// ------------------------------------------------------------------ operations

/// Divide by the row sum and fold the floating-point residual into the
/// largest entry so the row sums to 1 exactly (up to one ulp).
void normalize_probability_row(std::vector<double>& row);

/// Invariant diagnostics; an empty list means the model is valid. Violations
/// name the offending index or cell.
std::vector<std::string> validate(const TabularMDP& m);
std::vector<std::string> validate(const TabularPOMDP& m);
std::vector<std::string> validate(const RegionModel& m);
std::vector<std::string> validate(const AdditiveNoiseModel& m);

/// sup over (state, action) cells of the TV distance between kernel rows.
/// Tabular pairs must share shapes and labels; region pairs are compared on
/// the common refinement of their partitions, which is exact because kernels
/// are region-constant.
double kernel_tv_sup(const TabularMDP& a, const TabularMDP& b);
double kernel_tv_sup(const RegionModel& a, const RegionModel& b);
double kernel_w1_sup(const TabularMDP& a, const TabularMDP& b);
double kernel_w1_sup(const RegionModel& a, const RegionModel& b);

struct DiscretizeResult {
    TabularMDP mdp;
    double max_renormalization_defect = 0.0;   // mass escaping the bins, per row
};

/// Tabular approximation of an additive-noise model on n_bins equal bins
/// (states at bin midpoints). The defect threshold guards against drifts that
/// push mass outside the state interval. Cost defaults to zero; an initial
/// measure defaults to the uniform row.
DiscretizeResult discretize(const AdditiveNoiseModel& m, int n_bins,
                            const CostSpec* cost = nullptr,
                            const Measure1D* initial = nullptr,
                            double discount = 0.5,
                            double defect_threshold = 1e-6);

// -------------------------------------------------------------------- file I/O

/// Versioned JSON forms (schema_version field mandatory). Region kernels and
/// initial measures embed the Measure1D text serialization as strings.
std::string to_json(const TabularMDP& m);
std::string to_json(const TabularPOMDP& m);
std::string to_json(const RegionModel& m);
TabularMDP tabular_mdp_from_json(const std::string& text);
TabularPOMDP tabular_pomdp_from_json(const std::string& text);
RegionModel region_model_from_json(const std::string& text);
/// Dispatch on the "type" field; returns the diagnostics of whichever model
/// the file contains.
std::vector<std::string> validate_model_json(const std::string& text);

} // namespace kmlab

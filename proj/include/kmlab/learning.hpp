#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmlab/models.hpp"
#include "kmlab/robustness.hpp"
#include "kmlab/solvers.hpp"

namespace kmlab {

/// Tabular trajectory: states[0..steps], actions[0..steps-1]; reproducible
/// from (model, exploration, seed).
struct Trajectory {
    std::vector<int> states;
    std::vector<int> actions;
    std::string exploration_id;   // "uniform" or "policy"
    std::uint64_t seed = 0;
};

/// Simulate under a stationary policy, or uniform-random exploration when
/// exploration is null (the weakest policy meeting the visitation hypothesis).
Trajectory simulate(const TabularMDP& m, const StationaryPolicy* exploration, int steps,
                    std::uint64_t seed);

/// Real-state trajectory of an additive-noise model under uniform-random
/// exploration from x0.
struct RealTrajectory {
    std::vector<double> states;
    std::vector<int> actions;
    std::uint64_t seed = 0;
};
RealTrajectory simulate_additive(const AdditiveNoiseModel& m, double x0, int steps,
                                 std::uint64_t seed);

enum class Fallback { Uniform, SelfLoop };

/// Count-ratio kernel estimate. Unvisited (x,u) cells take the fallback row
/// and are flagged; every row is exactly stochastic.
struct EmpiricalKernel {
    std::vector<std::vector<std::vector<double>>> kernel;
    std::vector<std::vector<long>> visits;
    std::vector<std::pair<int, int>> unvisited;
};
EmpiricalKernel empirical_kernel(const Trajectory& tr, int n_states, int n_actions,
                                 Fallback fallback = Fallback::Uniform);

/// Noise residuals w_i = x_{i+1} - f(x_i, u_i) as equal-mass atoms (the drift
/// is assumed known exactly).
Measure1D recover_noise(const RealTrajectory& tr, const AdditiveNoiseModel& m);

/// ceil(N^(1/3)) clipped to [5, 200].
int default_bin_count(std::size_t n_samples);

/// Normalized piecewise-constant histogram on equal bins over [lo, hi).
/// Throws on empty input or samples outside the range.
Measure1D histogram_density(const std::vector<double>& samples, int bins, double lo, double hi);

/// Kernel table cell (i, a) = noise shifted by f(grid[i], u_a).
std::vector<std::vector<Measure1D>> pushforward_kernel(const Measure1D& noise,
                                                       const AdditiveNoiseModel& m,
                                                       const std::vector<double>& state_grid);

double table_tv_sup(const std::vector<std::vector<Measure1D>>& a,
                    const std::vector<std::vector<Measure1D>>& b);
double table_w1_sup(const std::vector<std::vector<Measure1D>>& a,
                    const std::vector<std::vector<Measure1D>>& b);

// --------------------------------------------------------------- learning curve

struct CurvePoint {
    long sample_size = 0;
    std::uint64_t seed = 0;
    MismatchRecord record;
    int unvisited_cells = 0;
};

struct LearningCurve {
    std::string estimator;
    std::vector<long> sample_sizes;
    std::vector<CurvePoint> points;   // ordered by (sample size, seed)

    static std::string csv_header();
    std::string csv_rows() const;
    /// Median loss per sample size, in sample-size order.
    std::vector<double> median_losses() const;
};

/// The data-driven pipeline: per (N, seed), estimate the kernel from the
/// first N transitions of a uniform-exploration trajectory, design against
/// the estimate by value iteration, and measure the mismatch loss on the
/// truth. estimator must be "count". Deterministic in (config, master_seed).
LearningCurve learning_curve(const TabularMDP& truth, const std::string& estimator,
                             std::vector<long> sample_sizes, int n_seeds,
                             std::uint64_t master_seed, double tol);

} // namespace kmlab

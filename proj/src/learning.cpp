#include "kmlab/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace kmlab {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

int sample_index(const std::vector<double>& row, SplitMix64& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        cum += row[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(row.size()) - 1;
}

} // namespace

Trajectory simulate(const TabularMDP& m, const StationaryPolicy* exploration, int steps,
                    std::uint64_t seed) {
    const auto diag = validate(m);
    if (!diag.empty()) throw std::invalid_argument("simulate: invalid model: " + diag.front());
    if (exploration && static_cast<int>(exploration->action.size()) != m.n_states())
        throw std::invalid_argument("simulate: exploration policy does not cover all states");

    SplitMix64 rng(seed);
    Trajectory tr;
    tr.seed = seed;
    tr.exploration_id = exploration ? "policy" : "uniform";
    tr.states.reserve(steps + 1);
    tr.actions.reserve(steps);
    int x = sample_index(m.initial, rng);
    tr.states.push_back(x);
    for (int t = 0; t < steps; ++t) {
        const int u = exploration ? exploration->action[x]
                                  : static_cast<int>(rng.next_below(m.n_actions()));
        x = sample_index(m.kernel[x][u], rng);
        tr.actions.push_back(u);
        tr.states.push_back(x);
    }
    return tr;
}

RealTrajectory simulate_additive(const AdditiveNoiseModel& m, double x0, int steps,
                                 std::uint64_t seed) {
    const auto diag = validate(m);
    if (!diag.empty())
        throw std::invalid_argument("simulate_additive: invalid model: " + diag.front());
    SplitMix64 rng(seed);
    RealTrajectory tr;
    tr.seed = seed;
    tr.states.reserve(steps + 1);
    tr.actions.reserve(steps);
    double x = x0;
    tr.states.push_back(x);
    for (int t = 0; t < steps; ++t) {
        const int u = static_cast<int>(rng.next_below(m.n_actions()));
        const double w = sample(m.noise, rng);
        x = std::clamp(m.drift_at(x, u) + w, m.state_lo, m.state_hi);
        tr.actions.push_back(u);
        tr.states.push_back(x);
    }
    return tr;
}

EmpiricalKernel empirical_kernel(const Trajectory& tr, int n_states, int n_actions,
                                 Fallback fallback) {
    if (tr.actions.empty()) throw std::invalid_argument("empirical_kernel: empty trajectory");
    EmpiricalKernel out;
    out.visits.assign(n_states, std::vector<long>(n_actions, 0));
    std::vector<std::vector<std::vector<long>>> counts(
        n_states, std::vector<std::vector<long>>(n_actions, std::vector<long>(n_states, 0)));
    for (std::size_t i = 0; i < tr.actions.size(); ++i) {
        const int x = tr.states[i], u = tr.actions[i], x2 = tr.states[i + 1];
        ++counts[x][u][x2];
        ++out.visits[x][u];
    }
    out.kernel.assign(n_states,
                      std::vector<std::vector<double>>(n_actions, std::vector<double>(n_states)));
    for (int x = 0; x < n_states; ++x)
        for (int u = 0; u < n_actions; ++u) {
            auto& row = out.kernel[x][u];
            if (out.visits[x][u] == 0) {
                out.unvisited.emplace_back(x, u);
                if (fallback == Fallback::Uniform) {
                    std::fill(row.begin(), row.end(), 1.0 / n_states);
                    normalize_probability_row(row);
                } else {
                    std::fill(row.begin(), row.end(), 0.0);
                    row[x] = 1.0;
                }
                continue;
            }
            for (int y = 0; y < n_states; ++y)
                row[y] = static_cast<double>(counts[x][u][y]);
            normalize_probability_row(row);
        }
    return out;
}

Measure1D recover_noise(const RealTrajectory& tr, const AdditiveNoiseModel& m) {
    if (tr.actions.empty()) throw std::invalid_argument("recover_noise: empty trajectory");
    const double mass = 1.0 / static_cast<double>(tr.actions.size());
    std::vector<Atom> atoms;
    atoms.reserve(tr.actions.size());
    for (std::size_t i = 0; i < tr.actions.size(); ++i)
        atoms.push_back(Atom{tr.states[i + 1] - m.drift_at(tr.states[i], tr.actions[i]), mass});
    return Measure1D(std::move(atoms), {});
}

int default_bin_count(std::size_t n_samples) {
    const int b = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n_samples))));
    return std::clamp(b, 5, 200);
}

Measure1D histogram_density(const std::vector<double>& samples, int bins, double lo, double hi) {
    if (samples.empty()) throw std::invalid_argument("histogram_density: no samples");
    if (bins < 1) throw std::invalid_argument("histogram_density: need at least one bin");
    if (!(lo < hi)) throw std::invalid_argument("histogram_density: empty range");
    const double width = (hi - lo) / bins;
    std::vector<double> mass(bins, 0.0);
    for (double s : samples) {
        if (s < lo || s > hi)
            throw std::invalid_argument("histogram_density: sample " + fmt17(s) +
                                        " outside [" + fmt17(lo) + ", " + fmt17(hi) + "]");
        int b = static_cast<int>((s - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        mass[b] += 1.0;
    }
    normalize_probability_row(mass);
    std::vector<Piece> pieces;
    for (int b = 0; b < bins; ++b)
        if (mass[b] > 0.0)
            pieces.push_back(Piece{lo + b * width, lo + (b + 1) * width, mass[b] / width});
    return Measure1D({}, std::move(pieces));
}

std::vector<std::vector<Measure1D>> pushforward_kernel(const Measure1D& noise,
                                                       const AdditiveNoiseModel& m,
                                                       const std::vector<double>& state_grid) {
    std::vector<std::vector<Measure1D>> table;
    table.reserve(state_grid.size());
    for (double x : state_grid) {
        std::vector<Measure1D> row;
        row.reserve(m.n_actions());
        for (int u = 0; u < m.n_actions(); ++u)
            row.push_back(pushforward_affine(noise, 1.0, m.drift_at(x, u)));
        table.push_back(std::move(row));
    }
    return table;
}

namespace {

template <typename Dist>
double table_sup(const std::vector<std::vector<Measure1D>>& a,
                 const std::vector<std::vector<Measure1D>>& b, Dist dist) {
    if (a.size() != b.size()) throw std::invalid_argument("kernel tables have different sizes");
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size())
            throw std::invalid_argument("kernel tables have different sizes");
        for (std::size_t j = 0; j < a[i].size(); ++j) sup = std::max(sup, dist(a[i][j], b[i][j]));
    }
    return sup;
}

} // namespace

double table_tv_sup(const std::vector<std::vector<Measure1D>>& a,
                    const std::vector<std::vector<Measure1D>>& b) {
    return table_sup(a, b, [](const Measure1D& x, const Measure1D& y) {
        return tv_distance(x, y);
    });
}

double table_w1_sup(const std::vector<std::vector<Measure1D>>& a,
                    const std::vector<std::vector<Measure1D>>& b) {
    return table_sup(a, b, [](const Measure1D& x, const Measure1D& y) {
        return w1_distance(x, y);
    });
}

// --------------------------------------------------------------- learning curve

std::string LearningCurve::csv_header() {
    return "N,seed,estimator,sup_tv,sup_w1,j_opt_true,j_cross,loss,robustness_bound,"
           "bound_holds,unvisited_cells";
}

std::string LearningCurve::csv_rows() const {
    std::string s;
    for (const auto& p : points) {
        s += std::to_string(p.sample_size) + "," + std::to_string(p.seed) + "," + estimator +
             "," + fmt17(p.record.kernel_tv_sup) + "," + fmt17(p.record.kernel_w1_sup) + "," +
             fmt17(p.record.j_opt_true) + "," + fmt17(p.record.j_cross) + "," +
             fmt17(p.record.loss) + "," + fmt17(p.record.robustness_bound) + "," +
             (p.record.bound_holds ? "1" : "0") + "," + std::to_string(p.unvisited_cells) + "\n";
    }
    return s;
}

std::vector<double> LearningCurve::median_losses() const {
    std::vector<double> medians;
    for (long n : sample_sizes) {
        std::vector<double> losses;
        for (const auto& p : points)
            if (p.sample_size == n) losses.push_back(p.record.loss);
        if (losses.empty()) continue;
        std::sort(losses.begin(), losses.end());
        const std::size_t k = losses.size();
        medians.push_back(k % 2 == 1 ? losses[k / 2]
                                     : 0.5 * (losses[k / 2 - 1] + losses[k / 2]));
    }
    return medians;
}

LearningCurve learning_curve(const TabularMDP& truth, const std::string& estimator,
                             std::vector<long> sample_sizes, int n_seeds,
                             std::uint64_t master_seed, double tol) {
    if (estimator != "count")
        throw std::invalid_argument("learning_curve: unknown estimator '" + estimator +
                                    "' (tabular models support \"count\")");
    std::sort(sample_sizes.begin(), sample_sizes.end());
    if (sample_sizes.empty() || sample_sizes.front() < 1)
        throw std::invalid_argument("learning_curve: sample sizes must be positive");
    for (std::size_t i = 1; i < sample_sizes.size(); ++i)
        if (sample_sizes[i] == sample_sizes[i - 1])
            throw std::invalid_argument("learning_curve: sample sizes must be strictly increasing");

    LearningCurve curve;
    curve.estimator = estimator;
    curve.sample_sizes = sample_sizes;

    const long n_max = sample_sizes.back();
    // Points are generated seed-major and re-sorted, so the output order is
    // (N, seed) regardless of how the work is scheduled.
    for (int s = 0; s < n_seeds; ++s) {
        const std::uint64_t seed = substream_seed(master_seed, static_cast<std::uint64_t>(s));
        const Trajectory tr = simulate(truth, nullptr, static_cast<int>(n_max), seed);
        for (long n : sample_sizes) {
            Trajectory prefix;
            prefix.seed = seed;
            prefix.exploration_id = tr.exploration_id;
            prefix.states.assign(tr.states.begin(), tr.states.begin() + n + 1);
            prefix.actions.assign(tr.actions.begin(), tr.actions.begin() + n);
            const EmpiricalKernel est =
                empirical_kernel(prefix, truth.n_states(), truth.n_actions(), Fallback::Uniform);

            TabularMDP estimate = truth;
            estimate.kernel = est.kernel;

            CurvePoint point;
            point.sample_size = n;
            point.seed = seed;
            point.unvisited_cells = static_cast<int>(est.unvisited.size());
            point.record = mismatch_loss(truth, estimate, tol);
            point.record.true_id = "truth";
            point.record.design_id = "count-N" + std::to_string(n);
            curve.points.push_back(std::move(point));
        }
    }
    std::stable_sort(curve.points.begin(), curve.points.end(),
                     [](const CurvePoint& a, const CurvePoint& b) {
                         return a.sample_size < b.sample_size;
                     });
    return curve;
}

} // namespace kmlab

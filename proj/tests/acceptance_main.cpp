// Acceptance suite: one line per criterion, PASS/FAIL, with the measured
// runtime against the budget. Exit status is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "kmlab/experiment.hpp"
#include "kmlab/gallery.hpp"
#include "kmlab/learning.hpp"
#include "kmlab/robustness.hpp"
#include "kmlab/solvers.hpp"

using namespace kmlab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20260810;
constexpr double kTol = 1e-9;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) {
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

int g_failures = 0;

void criterion(int id, const std::string& name, double limit_seconds,
               const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= limit_seconds)
        out.require(false, "runtime " + std::to_string(secs) + "s exceeds budget");
    if (!out.pass) ++g_failures;
    std::printf("%s  criterion %2d  %-38s  %7.3fs (< %gs)%s%s\n", out.pass ? "PASS" : "FAIL", id,
                name.c_str(), secs, limit_seconds, out.detail.empty() ? "" : "  -- ",
                out.detail.c_str());
    std::fflush(stdout);
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

double machine_value(const RegionModel& m, const RegionPolicy& pi) {
    return evaluate_region_policy(m, pi, 1e-10).value;
}

// The random tabular corpus shared by criteria 6 and 7.
std::vector<MismatchRecord> bounds_corpus(int pairs) {
    const std::vector<double> eps_grid{0.01, 0.05, 0.2};
    const std::vector<double> beta_grid{0.3, 0.5, 0.9};
    std::vector<MismatchRecord> records;
    records.reserve(pairs);
    for (int i = 0; i < pairs; ++i) {
        SplitMix64 rng(substream_seed(kSeed, static_cast<std::uint64_t>(i)));
        const double eps = eps_grid[i % eps_grid.size()];
        const double beta = beta_grid[(i / eps_grid.size()) % beta_grid.size()];
        const int nx = 2 + static_cast<int>(rng.next_below(5));   // |X| <= 6
        const int nu = 2 + static_cast<int>(rng.next_below(3));   // |U| <= 4
        const TabularMDP truth = make_random_mdp(nx, nu, beta, rng);
        const TabularMDP design = mix_kernel_toward_random(truth, eps, rng);
        records.push_back(mismatch_loss(truth, design, kTol));
    }
    return records;
}

} // namespace

int main() {
    std::printf("kmlab acceptance suite (master seed %llu)\n",
                static_cast<unsigned long long>(kSeed));

    // ----------------------------------------------------------------- 1
    criterion(1, "weak-convergence discontinuity", 1.0, [](Outcome& out) {
        const double beta = 0.5;
        for (int n : {4, 10, 100, 1000}) {
            const GalleryEntry e = make_weak_pomdp(n, beta);
            const double jn = machine_value(e.model_n, e.design_policy);
            const double want = beta * (1.0 - 1.0 / n) * (1.0 - 1.0 / n);
            out.require(std::abs(jn - want) <= 1e-9,
                        "J*(T_n) at n=" + std::to_string(n) + " is " + num(jn));
        }
        const GalleryEntry e = make_weak_pomdp(4, beta);
        const double jt = machine_value(e.model_true, e.true_policy);
        out.require(std::abs(jt - 1.0) <= 1e-9, "J*(T) = " + num(jt));
        const double gap = std::abs(beta - jt);   // lim_n J*(T_n) = beta
        out.require(std::abs(gap - 0.5) <= 1e-9, "discontinuity gap = " + num(gap));
    });

    // ----------------------------------------------------------------- 2
    criterion(2, "fully-observed weak discontinuity", 1.0, [](Outcome& out) {
        const double beta = 0.5;
        for (int n : {4, 10, 100, 1000}) {
            const GalleryEntry e = make_weak_fully(n, beta);
            const double jn = machine_value(e.model_n, e.design_policy);
            const double exact = beta / (static_cast<double>(n) * n) + beta * beta / (1.0 - beta);
            out.require(std::abs(jn - exact) <= 1e-9,
                        "exact J*(T_n) at n=" + std::to_string(n) + " is " + num(jn));
            const double printed = e.paper("j_opt_n", beta);
            out.require(std::abs(printed - (1.0 / (static_cast<double>(n) * n) + 0.5)) <= 1e-12,
                        "recorded printed value drifted");
            const double jt = machine_value(e.model_true, e.true_policy);
            out.require(std::abs(jt) <= 1e-9, "J*(T) = " + num(jt));
        }
        // Both forms share the limit beta^2/(1-beta) = 0.5.
        out.require(std::abs(gallery_form_exact("weak_fully", "j_opt_n", beta, 1 << 30) - 0.5) <=
                        1e-9,
                    "exact-form limit is off");
        out.require(std::abs(gallery_form_paper("weak_fully", "j_opt_n", beta, 1 << 30) - 0.5) <=
                        1e-9,
                    "printed-form limit is off");
    });

    // ----------------------------------------------------------------- 3
    criterion(3, "weak non-robustness", 1.0, [](Outcome& out) {
        const double beta = 0.5;
        double w1_first = 0.0, w1_last = 0.0;
        for (int n : {2, 10, 100}) {
            const GalleryEntry e = make_robust_weak(n, beta);
            const double w1 = kernel_w1_sup(e.model_n, e.model_true);
            out.require(std::abs(w1 - 1.0 / n) <= 1e-9,
                        "sup W1 at n=" + std::to_string(n) + " is " + num(w1));
            const double loss = machine_value(e.model_true, e.design_policy) -
                                machine_value(e.model_true, e.true_policy);
            out.require(std::abs(loss - 2.0) <= 1e-9,
                        "loss at n=" + std::to_string(n) + " is " + num(loss));
            out.require(loss > 0.5, "loss vanished");   // the non-vanishing flag
            if (n == 2) w1_first = w1;
            w1_last = w1;
        }
        out.require(w1_last < w1_first / 10.0, "sup W1 is not shrinking");
    });

    // ----------------------------------------------------------------- 4
    criterion(4, "setwise discontinuity", 1.0, [](Outcome& out) {
        const double beta = 0.5;
        // Stated per-n form beta/(1-beta) (1/12 + 1/(8n)). The construction's
        // own stage integral is exactly 1/12 for every even n (the square wave
        // cancels against min(x^2,(x-1)^2) under x -> 1-x), so the computed
        // value is beta/(1-beta)/12 and this sub-check fails; kept red rather
        // than bending the evaluator or the expected table. See README.
        for (int n : {2, 4, 10, 100}) {
            const GalleryEntry e = make_setwise_cont(n, beta);
            const double jn = machine_value(e.model_n, e.design_policy);
            const double stated = beta / (1.0 - beta) * (1.0 / 12.0 + 1.0 / (8.0 * n));
            out.require(std::abs(jn - stated) <= 1e-9,
                        "J*(T_n) at n=" + std::to_string(n) + " computed " + num(jn) +
                            " vs stated " + num(stated) + " (construction gives 1/12 exactly)");
        }
        const GalleryEntry e = make_setwise_cont(4, beta);
        const double jt = machine_value(e.model_true, e.true_policy);
        out.require(std::abs(jt - 1.0 / 18) <= 1e-9, "J*(T) = " + num(jt));
        const double jn_limit = machine_value(make_setwise_cont(100, beta).model_n,
                                              make_setwise_cont(100, beta).design_policy);
        const double gap = std::abs(jn_limit - jt);
        out.require(std::abs(gap - 1.0 / 36) <= 1e-9, "limit gap = " + num(gap));
    });

    // ----------------------------------------------------------------- 5
    criterion(5, "setwise non-robustness", 1.0, [](Outcome& out) {
        const double beta = 0.5;
        for (int n : {2, 4, 10, 100}) {
            const double gap = setwise_gap(square_wave_density(n), Measure1D::uniform(0.0, 1.0),
                                           dyadic_prefix_family(n));
            out.require(gap <= 1.0 / (2.0 * n) + 1e-15,
                        "setwise gap at n=" + std::to_string(n) + " is " + num(gap));

            const GalleryEntry e = make_setwise_robust(n, beta);
            const double loss = machine_value(e.model_true, e.design_policy) -
                                machine_value(e.model_true, e.true_policy);
            const double want =
                beta / (1.0 - beta) * (1.25 - 1.0 / (8.0 * n)) - beta / (2.0 * (1.0 - beta));
            out.require(std::abs(loss - want) <= 1e-9,
                        "loss at n=" + std::to_string(n) + " is " + num(loss));

            // Printed per-stage integrals, reproduced exactly.
            const PiecewisePoly x_poly({PolyPiece{0.0, 1.0, {0.0, 1.0, 0.0, 0.0}}});
            const double int_L =
                integrate(Measure1D::step_density(square_wave_left(n), 1.0), x_poly);
            out.require(std::abs(int_L - (0.25 - 1.0 / (8.0 * n))) <= 1e-13,
                        "int_L x dx at n=" + std::to_string(n) + " is " + num(int_L));
            const double int_R = integrate(Measure1D::step_density(square_wave_right(n), 1.0),
                                           PiecewisePoly::constant(0.0, 1.0, 2.0));
            out.require(std::abs(int_R - 1.0) <= 1e-13,
                        "int_R 2 dx at n=" + std::to_string(n) + " is " + num(int_R));
        }
        const double limit_loss = gallery_form_exact("setwise_robust", "loss", beta, 1 << 30);
        out.require(std::abs(limit_loss - 0.75) <= 1e-8, "limit loss = " + num(limit_loss));
    });

    // ------------------------------------------------------------- 6 & 7
    std::vector<MismatchRecord> corpus;
    criterion(6, "TV continuity bound, 200 random pairs", 10.0, [&corpus](Outcome& out) {
        corpus = bounds_corpus(200);
        int violations = 0;
        for (const auto& r : corpus)
            if (std::abs(r.j_opt_true - r.j_opt_design) > r.continuity_bound + 4.0 * kTol)
                ++violations;
        out.require(violations == 0, std::to_string(violations) + " violations");
        out.note("0 violations in " + std::to_string(corpus.size()) + " pairs");
    });

    criterion(7, "TV robustness bound, same corpus", 20.0, [&corpus](Outcome& out) {
        out.require(corpus.size() == 200, "corpus missing");
        int violations = 0;
        for (const auto& r : corpus)
            if (r.loss > r.robustness_bound + 4.0 * kTol || !r.bound_holds) ++violations;
        out.require(violations == 0, std::to_string(violations) + " violations");
        out.note("0 violations in " + std::to_string(corpus.size()) + " pairs");
    });

    // ----------------------------------------------------------------- 8
    criterion(8, "strategic-measure TV inequality", 30.0, [](Outcome& out) {
        int violations = 0, monotone_breaks = 0;
        for (int i = 0; i < 100; ++i) {
            SplitMix64 rng(substream_seed(kSeed ^ 0x5742, static_cast<std::uint64_t>(i)));
            const TabularPOMDP p1 = make_random_pomdp(3, 2, 2, 0.5, rng);
            const TabularPOMDP p2 = mix_pomdp_kernel(p1, 0.1, rng);
            const HistoryPolicy pi = HistoryPolicy::random(2, 4, 2, rng);
            double prev = 0.0;
            for (int k = 1; k <= 4; ++k) {
                const auto r = strategic_tv(p1, p2, pi, k);
                if (r.exact_tv > r.bound + 1e-10) ++violations;
                if (r.exact_tv < prev - 1e-12) ++monotone_breaks;
                prev = r.exact_tv;
            }
        }
        out.require(violations == 0, std::to_string(violations) + " bound violations");
        out.require(monotone_breaks == 0, std::to_string(monotone_breaks) + " monotone breaks");
        out.note("100 pairs, horizons 1..4, 0 violations");
    });

    // ----------------------------------------------------------------- 9
    criterion(9, "sup-over-policies gap", 60.0, [](Outcome& out) {
        const int horizon = 2;
        std::size_t policies = 0;
        for (int i = 0; i < 3; ++i) {
            SplitMix64 rng(substream_seed(kSeed ^ 0x9caf, static_cast<std::uint64_t>(i)));
            const TabularPOMDP p1 = make_random_pomdp(3, 2, 2, 0.5, rng);
            const TabularMDP target = make_random_mdp(3, 2, 0.5, rng);
            BeliefSolveOptions opt;
            opt.tol = 1e-2;
            const double j1 = solve_pomdp_belief_tree(p1, opt).value;
            double prev_gap = 1e300;
            for (double eps : {0.2, 0.1, 0.05, 0.025}) {
                TabularPOMDP p2 = p1;
                p2.mdp = mix_kernels(p1.mdp, target, eps);
                const auto g = policy_sup_gap(p1, p2, horizon, 100000);
                policies = g.policies;
                const double j2 = solve_pomdp_belief_tree(p2, opt).value;
                out.require(g.gap >= std::abs(j1 - j2) - 2.0 * g.tail_bound,
                            "gap " + num(g.gap) + " below optimal-value gap at eps " + num(eps));
                out.require(g.gap <= prev_gap + 1e-12,
                            "gap grew along the mixing ray at eps " + num(eps));
                prev_gap = g.gap;
            }
        }
        out.note(std::to_string(policies) + " policies per pair, H = 2");
    });

    // ---------------------------------------------------------------- 10
    criterion(10, "data-driven consistency", 60.0, [](Outcome& out) {
        SplitMix64 rng(substream_seed(kSeed ^ 0x1ea5, 0));
        // beta = 0.95 keeps the small-sample decade informative: at 0.5 the
        // greedy policy is already exact from 100 transitions on this model.
        const TabularMDP truth = make_random_mdp(5, 3, 0.95, rng);
        const LearningCurve curve = learning_curve(
            truth, "count", {100, 1000, 10000, 100000}, 20, substream_seed(kSeed ^ 0x1ea5, 1),
            1e-6);
        int bound_breaks = 0;
        for (const auto& p : curve.points)
            if (!p.record.bound_holds) ++bound_breaks;
        out.require(bound_breaks == 0,
                    std::to_string(bound_breaks) + " per-record bound violations");
        const auto medians = curve.median_losses();
        for (std::size_t i = 1; i < medians.size(); ++i)
            out.require(medians[i] <= medians[i - 1] + 1e-12,
                        "median loss increased into decade " + std::to_string(i));
        const double cap = 0.05 * truth.cost_sup() / (1.0 - truth.discount);
        out.require(medians.back() <= cap,
                    "final median " + num(medians.back()) + " above " + num(cap));
        out.note("final median loss " + num(medians.back()));
    });

    // ---------------------------------------------------------------- 11
    criterion(11, "estimator consistency", 10.0, [](Outcome& out) {
        const PiecewisePoly hold = PiecewisePoly::constant(0.0, 1.0, 0.0);
        const AdditiveNoiseModel m =
            make_additive_noise({hold}, Measure1D::uniform(0.0, 1.0), {0.0}, 0.0, 1.0);
        const RealTrajectory tr = simulate_additive(m, 0.5, 10000, substream_seed(kSeed, 101));
        const Measure1D noise_hat = recover_noise(tr, m);
        const double w1 = w1_distance(noise_hat, Measure1D::uniform(0.0, 1.0));
        out.require(w1 <= 0.02, "W1(recovered, truth) = " + num(w1));

        SplitMix64 rng(substream_seed(kSeed, 102));
        std::vector<double> xs(100000);
        const Measure1D u = Measure1D::uniform(0.0, 1.0);
        for (auto& x : xs) x = sample(u, rng);
        const Measure1D hist = histogram_density(xs, 20, 0.0, 1.0);
        const double tv = tv_distance(hist, u);
        out.require(tv <= 0.05, "TV(histogram, truth) = " + num(tv));

        // Shift invariance: kernel table distances equal the noise distances.
        const PiecewisePoly lin({PolyPiece{0.0, 1.0, {0.05, 0.5, 0.0, 0.0}}});
        const AdditiveNoiseModel shifted = make_additive_noise(
            {lin}, Measure1D::uniform(0.0, 0.45), {0.0}, 0.0, 1.0);
        const Measure1D other = histogram_density(
            std::vector<double>{0.05, 0.1, 0.2, 0.3, 0.4, 0.44}, 9, 0.0, 0.45);
        const std::vector<double> grid{0.1, 0.5, 0.9};
        const auto ta = pushforward_kernel(shifted.noise, shifted, grid);
        const auto tb = pushforward_kernel(other, shifted, grid);
        out.require(std::abs(table_tv_sup(ta, tb) - tv_distance(shifted.noise, other)) <= 1e-12,
                    "pushforward TV is not shift-invariant");
        out.require(std::abs(table_w1_sup(ta, tb) - w1_distance(shifted.noise, other)) <= 1e-12,
                    "pushforward W1 is not shift-invariant");
        out.note("W1 " + num(w1) + ", TV " + num(tv));
    });

    // ---------------------------------------------------------------- 12
    criterion(12, "byte-identical determinism", 30.0, [](Outcome& out) {
        const char* cfg = R"({
          "version": 1, "kind": "bounds", "master_seed": 20260810, "tol": 1e-9,
          "params": {"pairs": 30, "eps_grid": [0.05, 0.2], "beta_grid": [0.5, 0.9]}
        })";
        const fs::path base = fs::temp_directory_path() / "kmlab_acceptance_det";
        fs::remove_all(base);
        RunOptions a, b;
        a.out_dir = (base / "a").string();
        b.out_dir = (base / "b").string();
        b.jobs = 3;
        run_experiment(ExperimentConfig::parse(cfg), a);
        run_experiment(ExperimentConfig::parse(cfg), b);
        for (const char* name : {"records.csv", "records.jsonl", "manifest.json"}) {
            const std::string fa = read_file((base / "a" / name).string());
            const std::string fb = read_file((base / "b" / name).string());
            out.require(fa == fb, std::string(name) + " differs between reruns");
        }
        fs::remove_all(base);
    });

    std::printf("%d of 12 criteria passed\n", 12 - g_failures);
    return g_failures;
}

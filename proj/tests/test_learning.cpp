#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kmlab/gallery.hpp"
#include "kmlab/learning.hpp"
#include "oracles.hpp"

using namespace kmlab;

namespace {

TabularMDP two_cycle(double beta = 0.5) {
    // Deterministic two-state cycle under action 0; action 1 holds.
    TabularMDP m;
    m.state_labels = {{0.0}, {1.0}};
    m.action_labels = {0.0, 1.0};
    m.kernel = {{{0.0, 1.0}, {1.0, 0.0}}, {{1.0, 0.0}, {0.0, 1.0}}};
    m.cost = {{0.1, 0.9}, {0.8, 0.2}};
    m.discount = beta;
    m.initial = {1.0, 0.0};
    return m;
}

PiecewisePoly hold_drift() {
    // f(x, u) = 0 on [0, 1]: next state is the noise draw itself.
    return PiecewisePoly::constant(0.0, 1.0, 0.0);
}

} // namespace

TEST_CASE("simulate: determinism and cycles") {
    const TabularMDP m = two_cycle();
    StationaryPolicy cycle{{0, 0}};
    const Trajectory tr = simulate(m, &cycle, 10, 123);
    for (int t = 0; t <= 10; ++t) CHECK(tr.states[t] == t % 2);

    const Trajectory a = simulate(m, nullptr, 500, 42);
    const Trajectory b = simulate(m, nullptr, 500, 42);
    CHECK(a.states == b.states);
    CHECK(a.actions == b.actions);
    const Trajectory c = simulate(m, nullptr, 500, 43);
    CHECK(a.states != c.states);
}

TEST_CASE("simulate: uniform exploration visits every pair (pinned seed)") {
    SplitMix64 rng(64);
    const TabularMDP m = make_random_mdp(5, 3, 0.5, rng);
    const Trajectory tr = simulate(m, nullptr, 100000, 2026);
    const EmpiricalKernel est = empirical_kernel(tr, 5, 3);
    CHECK(est.unvisited.empty());
    for (int x = 0; x < 5; ++x)
        for (int u = 0; u < 3; ++u) CHECK(est.visits[x][u] >= 1);
}

TEST_CASE("empirical_kernel: counting and fallback") {
    Trajectory tr;
    // (x=0,u=0) visited four times with next states 1,1,0,1.
    tr.states = {0, 1, 0, 1, 0, 0, 1};
    tr.actions = {0, 1, 0, 1, 0, 0};
    const EmpiricalKernel est = empirical_kernel(tr, 2, 2);
    CHECK(est.kernel[0][0][1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(est.kernel[0][0][0] == doctest::Approx(0.25).epsilon(1e-15));
    // (0,1) never visited: uniform fallback, flagged.
    bool flagged = false;
    for (const auto& [x, u] : est.unvisited) flagged |= (x == 0 && u == 1);
    CHECK(flagged);
    CHECK(est.kernel[0][1][0] == doctest::Approx(0.5).epsilon(1e-15));

    // Rows exactly stochastic.
    for (int x = 0; x < 2; ++x)
        for (int u = 0; u < 2; ++u) {
            double s = 0.0;
            for (double v : est.kernel[x][u]) s += v;
            CHECK(std::abs(s - 1.0) <= 1e-15);
        }
    CHECK_THROWS(empirical_kernel(Trajectory{}, 2, 2));
}

TEST_CASE("empirical_kernel: consistency at N = 1e5 (pinned seed)") {
    SplitMix64 rng(65);
    const TabularMDP m = make_random_mdp(5, 3, 0.5, rng);
    const Trajectory tr = simulate(m, nullptr, 100000, 7);
    const EmpiricalKernel est = empirical_kernel(tr, 5, 3);
    TabularMDP hat = m;
    hat.kernel = est.kernel;
    CHECK(kernel_tv_sup(m, hat) <= 0.05);
}

TEST_CASE("recover_noise: spec examples") {
    const AdditiveNoiseModel still =
        make_additive_noise({PiecewisePoly::constant(0.0, 1.0, 0.5)}, Measure1D::point(0.0),
                            {0.0}, 0.0, 1.0);
    const RealTrajectory quiet = simulate_additive(still, 0.5, 200, 3);
    const Measure1D w = recover_noise(quiet, still);
    CHECK(w.atoms().size() == 1);
    CHECK(w.atoms()[0].loc == 0.0);
    CHECK(w.atoms()[0].mass == doctest::Approx(1.0).epsilon(1e-12));

    // Known uniform noise: W1 of the empirical atoms at N = 1e4.
    const AdditiveNoiseModel unif =
        make_additive_noise({hold_drift()}, Measure1D::uniform(0.0, 1.0), {0.0}, 0.0, 1.0);
    const RealTrajectory tr = simulate_additive(unif, 0.5, 10000, 11);
    const Measure1D atoms = recover_noise(tr, unif);
    CHECK(atoms.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w1_distance(atoms, Measure1D::uniform(0.0, 1.0)) <= 0.02);
}

TEST_CASE("histogram_density: spec examples") {
    const Measure1D spike = histogram_density(std::vector<double>(50, 0.42), 10, 0.0, 1.0);
    CHECK(spike.pieces().size() == 1);
    CHECK(spike.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(spike.mass_of(0.4, 0.5) == doctest::Approx(1.0).epsilon(1e-15));

    SplitMix64 rng(12);
    std::vector<double> xs(100000);
    const Measure1D u = Measure1D::uniform(0.0, 1.0);
    for (auto& x : xs) x = sample(u, rng);
    const Measure1D hist = histogram_density(xs, 20, 0.0, 1.0);
    CHECK(tv_distance(hist, u) <= 0.05);

    CHECK(default_bin_count(1) == 5);
    CHECK(default_bin_count(1000) == 10);
    CHECK(default_bin_count(100000000) == 200);
    CHECK_THROWS(histogram_density({}, 10, 0.0, 1.0));
    CHECK_THROWS(histogram_density({2.0}, 10, 0.0, 1.0));
}

TEST_CASE("pushforward_kernel: distances equal noise distances exactly") {
    const PiecewisePoly lin({PolyPiece{0.0, 1.0, {0.1, 0.5, 0.0, 0.0}}});
    const AdditiveNoiseModel m =
        make_additive_noise({hold_drift(), lin}, Measure1D::uniform(0.0, 0.2), {0.0, 1.0}, 0.0,
                            1.0);
    const std::vector<double> grid{0.1, 0.35, 0.6};

    // Point noise: cell (i, a) is exactly delta_{f(x_i, u_a)}.
    const auto table0 = pushforward_kernel(Measure1D::point(0.0), m, grid);
    CHECK(table0[1][1].atoms()[0].loc == doctest::Approx(0.1 + 0.5 * 0.35).epsilon(1e-15));

    SplitMix64 rng(13);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = 0.2 * rng.next_double();
    const Measure1D noise_a = Measure1D::uniform(0.0, 0.2);
    const Measure1D noise_b = histogram_density(xs, 8, 0.0, 0.2);
    const auto ta = pushforward_kernel(noise_a, m, grid);
    const auto tb = pushforward_kernel(noise_b, m, grid);
    CHECK(table_tv_sup(ta, tb) == doctest::Approx(tv_distance(noise_a, noise_b)).epsilon(1e-12));
    CHECK(table_w1_sup(ta, tb) == doctest::Approx(w1_distance(noise_a, noise_b)).epsilon(1e-12));
}

TEST_CASE("recover + pushforward + discretize commutes with direct counting") {
    // State-independent drift: every transition carries one noise residual,
    // so the discretization of (drift, empirical noise) must equal the pooled
    // next-bin histogram exactly (the residual shift is exact in binary:
    // the drift constant is a power of two).
    const Measure1D noise({Atom{0.125, 0.5}, Atom{0.375, 0.5}}, {});
    const AdditiveNoiseModel m =
        make_additive_noise({PiecewisePoly::constant(0.0, 1.0, 0.25)}, noise, {0.0}, 0.0, 1.0);
    const int bins = 4;
    const RealTrajectory tr = simulate_additive(m, 0.5, 4000, 17);
    const Measure1D w_hat = recover_noise(tr, m);

    AdditiveNoiseModel learned = m;
    learned.noise = w_hat;
    const auto d = discretize(learned, bins);
    CHECK(d.max_renormalization_defect <= 1e-12);

    std::vector<double> pooled(bins, 0.0);
    for (std::size_t t = 1; t < tr.states.size(); ++t) {
        const int j = std::min(bins - 1, static_cast<int>(tr.states[t] * bins));
        pooled[j] += 1.0;
    }
    for (double& v : pooled) v /= static_cast<double>(tr.states.size() - 1);

    for (int k = 0; k < bins; ++k)
        for (int j = 0; j < bins; ++j)
            CHECK(d.mdp.kernel[k][0][j] == doctest::Approx(pooled[j]).epsilon(1e-12));

    // The pushforward table agrees cell-for-cell with the discretized rows.
    const auto table =
        pushforward_kernel(w_hat, learned, {0.125, 0.375, 0.625, 0.875});
    for (int k = 0; k < bins; ++k)
        for (int j = 0; j < bins; ++j)
            CHECK(table[k][0].mass_of(j * 0.25, (j + 1) * 0.25) ==
                  doctest::Approx(d.mdp.kernel[k][0][j]).epsilon(1e-12));
}

TEST_CASE("learning_curve: exact learning of a deterministic kernel") {
    const TabularMDP m = two_cycle();
    const LearningCurve curve = learning_curve(m, "count", {64, 256}, 3, 99, 1e-9);
    REQUIRE(curve.points.size() == 6);
    for (const auto& p : curve.points) {
        // Uniform exploration on a deterministic kernel identifies every
        // visited row exactly; unvisited rows cannot hurt more than the bound.
        CHECK(p.record.bound_holds);
        if (p.unvisited_cells == 0) CHECK(p.record.loss <= 2e-9);
    }
}

TEST_CASE("learning_curve: per-record bound and determinism") {
    SplitMix64 rng(66);
    const TabularMDP m = make_random_mdp(4, 2, 0.5, rng);
    const LearningCurve a = learning_curve(m, "count", {100, 1000}, 4, 7, 1e-9);
    const LearningCurve b = learning_curve(m, "count", {100, 1000}, 4, 7, 1e-9);
    CHECK(a.csv_rows() == b.csv_rows());   // bit-identical
    for (const auto& p : a.points) {
        CHECK(p.record.loss <= p.record.robustness_bound + 4e-9);
        CHECK(p.record.bound_holds);
    }
    // Points ordered by (N, seed-order).
    for (std::size_t i = 1; i < a.points.size(); ++i)
        CHECK(a.points[i - 1].sample_size <= a.points[i].sample_size);

    CHECK_THROWS(learning_curve(m, "histogram", {10}, 1, 1, 1e-9));
    CHECK_THROWS(learning_curve(m, "count", {10, 10}, 1, 1, 1e-9));
}

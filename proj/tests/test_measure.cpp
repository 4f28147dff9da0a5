#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kmlab/gallery.hpp"
#include "kmlab/measure.hpp"
#include "oracles.hpp"

using namespace kmlab;

TEST_CASE("canonical form merges, sorts, and is idempotent") {
    Measure1D m({Atom{0.5, 0.25}, Atom{0.5 + 1e-13, 0.25}, Atom{0.1, 0.5}},
                {Piece{0.0, 0.5, 0.0}});
    CHECK(m.atoms().size() == 2);
    CHECK(m.atoms()[0].loc == 0.1);
    CHECK(m.atoms()[1].mass == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.pieces().empty());   // zero-height piece dropped
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-14));

    // Overlapping pieces are segment-split and merged back.
    Measure1D mix({}, {Piece{0.0, 1.0, 0.5}, Piece{0.25, 0.75, 0.5}});
    CHECK(mix.pieces().size() == 3);
    CHECK(mix.mass_of(0.25, 0.75) == doctest::Approx(0.5));
    Measure1D again(mix.atoms(), mix.pieces());
    CHECK(again == mix);
}

TEST_CASE("construction rejects bad components") {
    CHECK_THROWS(Measure1D({Atom{0.0, -0.1}}, {}));
    CHECK_THROWS(Measure1D({}, {Piece{1.0, 0.0, 1.0}}));
    CHECK_THROWS(Measure1D({}, {Piece{0.0, 1.0, -1.0}}));
}

TEST_CASE("tv distance: spec examples") {
    CHECK(tv_distance(Measure1D::point(1.0), Measure1D::point(1.0)) == 0.0);
    // Disjoint atoms are at full distance regardless of how close they sit.
    CHECK(tv_distance(Measure1D::point(0.9), Measure1D::point(1.0)) == 2.0);
    // Square wave vs uniform: int |f_n - 1| = 1 for every n.
    for (int n : {2, 4, 10}) {
        const double tv = tv_distance(square_wave_density(n), Measure1D::uniform(0.0, 1.0));
        CHECK(tv == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("tv distance validates normalization naming the mass") {
    const Measure1D half = Measure1D::point(0.0, 0.5);
    CHECK_THROWS_WITH_AS(tv_distance(half, Measure1D::point(0.0)),
                         doctest::Contains("0.5"), std::invalid_argument);
}

TEST_CASE("w1 distance: spec examples and grid oracle") {
    for (int n : {2, 5, 10}) {
        const double d = w1_distance(Measure1D::point(1.0 - 1.0 / n), Measure1D::point(1.0));
        CHECK(d == doctest::Approx(1.0 / n).epsilon(1e-12));
    }
    CHECK(w1_distance(Measure1D::uniform(0.0, 1.0), Measure1D::point(0.0)) ==
          doctest::Approx(0.5).epsilon(1e-12));
    // f_n vs uniform: n triangles of base 1/n and height 1/(2n).
    for (int n : {2, 4, 8}) {
        const double d = w1_distance(square_wave_density(n), Measure1D::uniform(0.0, 1.0));
        CHECK(d == doctest::Approx(1.0 / (4.0 * n)).epsilon(1e-12));
        CHECK(d == doctest::Approx(oracles::w1_grid(square_wave_density(n),
                                                    Measure1D::uniform(0.0, 1.0), 0.0, 1.0))
                       .epsilon(1e-4));
    }
}

TEST_CASE("setwise gap: spec examples") {
    const Measure1D u = Measure1D::uniform(0.0, 1.0);
    CHECK(setwise_gap(u, u, {{0.0, 0.5}, {0.2, 0.7}}) == 0.0);
    for (int n : {2, 4, 10}) {
        const double gap = setwise_gap(square_wave_density(n), u, dyadic_prefix_family(n));
        CHECK(gap == doctest::Approx(1.0 / (2.0 * n)).epsilon(1e-12));
    }
    CHECK(setwise_gap(Measure1D::point(0.9), Measure1D::point(1.0), {{0.85, 0.95}}) == 1.0);
    CHECK_THROWS(setwise_gap(u, u, {}));
}

TEST_CASE("integrate: spec examples") {
    const PiecewisePoly identity({PolyPiece{0.0, 1.0, {0.0, 1.0, 0.0, 0.0}}});
    CHECK(integrate(Measure1D::uniform(0.0, 1.0), identity) ==
          doctest::Approx(0.5).epsilon(1e-14));

    // Lebesgue integral of x over the n=4 left-interval union.
    const Measure1D lebesgue_L = Measure1D::step_density(square_wave_left(4), 1.0);
    const PiecewisePoly x_on_01({PolyPiece{0.0, 1.0, {0.0, 1.0, 0.0, 0.0}}});
    CHECK(integrate(lebesgue_L, x_on_01) == doctest::Approx(0.25 - 1.0 / 32).epsilon(1e-14));

    // int min(x^2, (x-1)^2) f_n(dx): the printed analysis claims 1/12 + 1/(8n),
    // but its own sum evaluates to exactly 1/12 for every even n (the square
    // wave cancels under x -> 1-x); the quadrature oracle agrees.
    const PiecewisePoly min_sq({PolyPiece{0.0, 0.5, {0.0, 0.0, 1.0, 0.0}},
                                PolyPiece{0.5, 1.0, {1.0, -2.0, 1.0, 0.0}}});
    for (int n : {2, 4, 10}) {
        const double v = integrate(square_wave_density(n), min_sq);
        CHECK(v == doctest::Approx(1.0 / 12).epsilon(1e-12));
        const double q = oracles::quadrature(square_wave_density(n), [](double x) {
            return std::min(x * x, (x - 1) * (x - 1));
        });
        CHECK(v == doctest::Approx(q).epsilon(1e-5));
    }

    // Undefined domain raises.
    const PiecewisePoly narrow({PolyPiece{0.2, 0.4, {1.0, 0.0, 0.0, 0.0}}});
    CHECK_THROWS(integrate(Measure1D::uniform(0.0, 1.0), narrow));
}

TEST_CASE("pushforward: spec examples and mass conservation") {
    const Measure1D shifted = pushforward_affine(Measure1D::point(0.0), 1.0, 2.5);
    CHECK(shifted.atoms()[0].loc == 2.5);

    const Measure1D u = pushforward_affine(Measure1D::uniform(0.0, 1.0), 1.0, 0.5);
    CHECK(u.pieces()[0].lo == 0.5);
    CHECK(u.pieces()[0].hi == 1.5);
    CHECK(u.pieces()[0].height == 1.0);

    const Measure1D stretched = pushforward_affine(Measure1D::uniform(0.0, 1.0), 2.0, 0.0);
    CHECK(stretched.pieces()[0].hi == 2.0);
    CHECK(stretched.pieces()[0].height == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(stretched.total_mass() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS(pushforward_affine(Measure1D::point(0.0), 0.0, 1.0));

    // Bijection: applying the inverse map restores the measure.
    SplitMix64 rng(7);
    for (int i = 0; i < 20; ++i) {
        const Measure1D m = oracles::random_mixture(rng);
        const Measure1D fwd = pushforward_affine(m, -3.0, 1.25);
        const Measure1D back = pushforward_affine(fwd, 1.0 / -3.0, -1.25 / -3.0);
        CHECK(back.total_mass() == doctest::Approx(m.total_mass()).epsilon(1e-13));
        CHECK(tv_distance(back, m) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("metric and inequality properties on random mixtures") {
    SplitMix64 rng(42);
    for (int i = 0; i < 60; ++i) {
        const Measure1D a = oracles::random_mixture(rng);
        const Measure1D b = oracles::random_mixture(rng);
        const Measure1D c = oracles::random_mixture(rng);

        const double tab = tv_distance(a, b);
        CHECK(tab == tv_distance(b, a));
        CHECK(tab >= 0.0);
        CHECK(tab <= 2.0 + 1e-12);
        CHECK(tv_distance(a, a) == 0.0);
        CHECK(tab <= tv_distance(a, c) + tv_distance(c, b) + 1e-12);
        CHECK(tab == doctest::Approx(oracles::tv_raw(a, b)).epsilon(1e-12));

        const double wab = w1_distance(a, b);
        CHECK(wab == w1_distance(b, a));
        CHECK(wab <= w1_distance(a, c) + w1_distance(c, b) + 1e-12);
        // Support in [0,1]: W1 <= (b-a) * TV / 2.
        CHECK(wab <= 1.0 * tab / 2.0 + 1e-12);

        const double gap = setwise_gap(a, b, {{0.0, 0.3}, {0.1, 0.9}, {0.5, 1.0}});
        CHECK(gap <= tab / 2.0 + 1e-12);
    }
}

TEST_CASE("sampling: spec examples") {
    SplitMix64 rng(1);
    CHECK(sample(Measure1D::point(3.0), rng) == 3.0);

    const Measure1D u = Measure1D::uniform(0.0, 1.0);
    double mean = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) mean += sample(u, rng);
    mean /= n;
    // CLT tolerance: 4 sigma / sqrt(N), sigma = 1/sqrt(12).
    CHECK(std::abs(mean - 0.5) <= 4.0 / std::sqrt(12.0 * n));

    const Measure1D fn = square_wave_density(4);
    for (int i = 0; i < 2000; ++i) {
        const double x = sample(fn, rng);
        bool in_left = false;
        for (const auto& [lo, hi] : square_wave_left(4)) in_left |= (lo <= x && x < hi);
        CHECK(in_left);
    }
}

TEST_CASE("sampling: DKW band at alpha = 1e-3") {
    SplitMix64 rng(99);
    const int n = 100000;
    const double band = std::sqrt(std::log(2.0 / 1e-3) / (2.0 * n));
    // Mixed measure with an atom inside the density support.
    const Measure1D m({Atom{0.5, 0.3}}, {Piece{0.0, 1.0, 0.7}});
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample(m, rng);
    std::sort(xs.begin(), xs.end());
    // sup_x |F_n - F| over distinct sample values, comparing both one-sided
    // limits (ties pile up on the atom).
    double worst = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        const double v = xs[i];
        const double atom_mass = m.mass_of(v, std::nextafter(v, 2.0));
        const double fv = m.cdf(v);
        worst = std::max(worst, std::abs(static_cast<double>(j) / n - fv));
        worst = std::max(worst, std::abs(static_cast<double>(i) / n - (fv - atom_mass)));
        i = j;
    }
    CHECK(worst <= band);
}

TEST_CASE("text serialization round-trips exactly") {
    SplitMix64 rng(5);
    for (int i = 0; i < 30; ++i) {
        const Measure1D m = oracles::random_mixture(rng, -2.0, 3.0);
        const Measure1D back = Measure1D::from_text(m.to_text());
        CHECK(back == m);
    }
    CHECK_THROWS(Measure1D::from_text("blob 1 2"));
}

TEST_CASE("piecewise polynomial evaluation and range") {
    // x^3 - x on [-2, 2]: critical points at +-1/sqrt(3).
    const PiecewisePoly p({PolyPiece{-2.0, 2.0, {0.0, -1.0, 0.0, 1.0}}});
    CHECK(p.eval(2.0) == doctest::Approx(6.0));   // closed right end
    const auto [mn, mx] = p.range(-2.0, 2.0);
    CHECK(mn == doctest::Approx(-6.0));
    CHECK(mx == doctest::Approx(6.0));
    CHECK(p.max_abs(-0.9, 0.9) == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-12));
    CHECK_THROWS(p.eval(2.5));
    CHECK_THROWS(PiecewisePoly({PolyPiece{0.0, 1.0, {}}, PolyPiece{0.5, 2.0, {}}}));
}

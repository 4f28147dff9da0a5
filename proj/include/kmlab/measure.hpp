#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kmlab/rng.hpp"

namespace kmlab {

/// Tolerance used when canonicalizing measures (merging coincident atoms)
/// and when validating probability normalization. Every construction in this
/// project works at scales far above it.
inline constexpr double kCanonicalTol = 1e-12;

struct Atom {
    double loc = 0.0;
    double mass = 0.0;
};

/// Half-open density piece [lo, hi) of constant height >= 0.
struct Piece {
    double lo = 0.0;
    double hi = 0.0;
    double height = 0.0;
};

/// Cubic polynomial c0 + c1 x + c2 x^2 + c3 x^3 on a half-open interval.
struct PolyPiece {
    double lo = 0.0;
    double hi = 0.0;
    std::array<double, 4> coeff{0.0, 0.0, 0.0, 0.0};

    double eval(double x) const {
        return coeff[0] + x * (coeff[1] + x * (coeff[2] + x * coeff[3]));
    }
};

/// Piecewise polynomial of degree <= 3 with sorted, non-overlapping pieces.
/// The domain is the union of the pieces; the right endpoint of the last
/// piece is treated as included so costs are defined on closed state
/// intervals.
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    explicit PiecewisePoly(std::vector<PolyPiece> pieces);

    static PiecewisePoly constant(double lo, double hi, double value);
    /// (x - u)^2 on [lo, hi].
    static PiecewisePoly squared_error(double lo, double hi, double u);

    double eval(double x) const;              // throws if x outside the domain
    bool defined_at(double x) const;
    /// Exact integral of the polynomial over [a, b] (Lebesgue); [a,b] must be
    /// covered by the domain.
    double integral(double a, double b) const;
    double max_abs(double lo, double hi) const;   // sup |f| over [lo,hi]
    /// Exact (min, max) of the polynomial over [lo, hi] ∩ domain.
    std::pair<double, double> range(double lo, double hi) const;
    double domain_lo() const;
    double domain_hi() const;

    const std::vector<PolyPiece>& pieces() const { return pieces_; }

private:
    std::vector<PolyPiece> pieces_;
};

/// Finite nonnegative measure on the real line: point masses plus a
/// piecewise-constant density, kept in canonical form (atoms sorted and
/// distinct, pieces sorted, disjoint, positive height, adjacent pieces of
/// exactly equal height merged). Probability measures are the mass-1 case;
/// operations that require normalization validate it explicitly.
class Measure1D {
public:
    Measure1D() = default;
    Measure1D(std::vector<Atom> atoms, std::vector<Piece> pieces);

    static Measure1D zero() { return Measure1D(); }
    static Measure1D point(double loc, double mass = 1.0);
    /// Uniform probability measure on [a, b).
    static Measure1D uniform(double a, double b);
    /// Density of constant height over each listed interval.
    static Measure1D step_density(const std::vector<std::pair<double, double>>& intervals,
                                  double height);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    bool empty() const { return atoms_.empty() && pieces_.empty(); }

    double total_mass() const;
    /// Throws std::invalid_argument naming the offending total if the mass is
    /// not 1 within kCanonicalTol.
    void require_probability(const char* who) const;

    /// Mass of the half-open interval [a, b).
    double mass_of(double a, double b) const;

    double support_lo() const;   // throws on the zero measure
    double support_hi() const;

    /// Left edge of the support and cumulative F(x) = mu((-inf, x]).
    double cdf(double x) const;

    void add_scaled(const Measure1D& other, double factor);   // accumulate, then canonicalize()
    void canonicalize();

    bool operator==(const Measure1D& other) const;

    std::string to_text() const;                  // "atom <loc> <mass>" / "piece <a> <b> <height>" lines
    static Measure1D from_text(const std::string& text);

private:
    std::vector<Atom> atoms_;
    std::vector<Piece> pieces_;
};

/// Total variation distance, factor-2 convention:
/// ||mu - nu||_TV = 2 sup_B |mu(B) - nu(B)| = sum |atom mass diff| + int |density diff|.
/// Requires canonical probability measures; range [0, 2].
double tv_distance(const Measure1D& mu, const Measure1D& nu);

/// Wasserstein-1 distance, computed exactly as int |F_mu - F_nu| dt (the CDFs
/// are piecewise linear with jumps). Requires probability measures; supports
/// are bounded by construction.
double w1_distance(const Measure1D& mu, const Measure1D& nu);

/// max over the family of |mu([a,b)) - nu([a,b))|; lower-bounds tv/2.
double setwise_gap(const Measure1D& mu, const Measure1D& nu,
                   const std::vector<std::pair<double, double>>& family);

/// Exact integral of f against mu: sum f(atom) mass + closed-form polynomial
/// integrals over the density pieces. Throws if f is undefined on part of the
/// support. mu need not be normalized.
double integrate(const Measure1D& mu, const PiecewisePoly& f);

/// Image of mu under x -> scale * x + shift (scale != 0). Mass preserved
/// exactly; density heights rescale by 1/|scale|.
Measure1D pushforward_affine(const Measure1D& mu, double scale, double shift);

/// Inverse-CDF sample; deterministic given the rng state.
double sample(const Measure1D& mu, SplitMix64& rng);

} // namespace kmlab

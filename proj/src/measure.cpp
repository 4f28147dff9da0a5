#include "kmlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kmlab {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Union of the sorted breakpoint sets of two measures (piece endpoints only).
std::vector<double> piece_breakpoints(const Measure1D& a, const Measure1D& b) {
    std::vector<double> pts;
    for (const auto& p : a.pieces()) { pts.push_back(p.lo); pts.push_back(p.hi); }
    for (const auto& p : b.pieces()) { pts.push_back(p.lo); pts.push_back(p.hi); }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double density_at(const Measure1D& m, double x) {
    for (const auto& p : m.pieces())
        if (p.lo <= x && x < p.hi) return p.height;
    return 0.0;
}

} // namespace

// ---------------------------------------------------------------- PiecewisePoly

PiecewisePoly::PiecewisePoly(std::vector<PolyPiece> pieces) : pieces_(std::move(pieces)) {
    std::sort(pieces_.begin(), pieces_.end(),
              [](const PolyPiece& a, const PolyPiece& b) { return a.lo < b.lo; });
    for (const auto& p : pieces_)
        if (!(p.lo < p.hi)) throw std::invalid_argument("PiecewisePoly: empty piece");
    for (std::size_t i = 1; i < pieces_.size(); ++i)
        if (pieces_[i].lo < pieces_[i - 1].hi)
            throw std::invalid_argument("PiecewisePoly: overlapping pieces");
}

PiecewisePoly PiecewisePoly::constant(double lo, double hi, double value) {
    return PiecewisePoly({PolyPiece{lo, hi, {value, 0.0, 0.0, 0.0}}});
}

PiecewisePoly PiecewisePoly::squared_error(double lo, double hi, double u) {
    return PiecewisePoly({PolyPiece{lo, hi, {u * u, -2.0 * u, 1.0, 0.0}}});
}

bool PiecewisePoly::defined_at(double x) const {
    for (const auto& p : pieces_)
        if (p.lo <= x && x < p.hi) return true;
    return !pieces_.empty() && x == pieces_.back().hi;
}

double PiecewisePoly::eval(double x) const {
    for (const auto& p : pieces_)
        if (p.lo <= x && x < p.hi) return p.eval(x);
    if (!pieces_.empty() && x == pieces_.back().hi) return pieces_.back().eval(x);
    throw std::invalid_argument("PiecewisePoly: undefined at x = " + fmt17(x));
}

double PiecewisePoly::domain_lo() const {
    if (pieces_.empty()) throw std::logic_error("PiecewisePoly: empty domain");
    return pieces_.front().lo;
}

double PiecewisePoly::domain_hi() const {
    if (pieces_.empty()) throw std::logic_error("PiecewisePoly: empty domain");
    return pieces_.back().hi;
}

namespace {
double poly_antiderivative(const std::array<double, 4>& c, double x) {
    return x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)));
}
} // namespace

double PiecewisePoly::integral(double a, double b) const {
    if (a > b) return -integral(b, a);
    if (a == b) return 0.0;
    // Coverage check: gaps inside [a,b] mean f is undefined somewhere there.
    double covered = a;
    double sum = 0.0;
    for (const auto& p : pieces_) {
        if (p.hi <= a || p.lo >= b) continue;
        const double lo = std::max(p.lo, a);
        const double hi = std::min(p.hi, b);
        if (lo > covered + 0.0)
            throw std::invalid_argument("PiecewisePoly: undefined on part of [" +
                                        fmt17(a) + ", " + fmt17(b) + ")");
        sum += poly_antiderivative(p.coeff, hi) - poly_antiderivative(p.coeff, lo);
        covered = std::max(covered, hi);
    }
    if (covered < b)
        throw std::invalid_argument("PiecewisePoly: undefined on part of [" +
                                    fmt17(a) + ", " + fmt17(b) + ")");
    return sum;
}

std::pair<double, double> PiecewisePoly::range(double lo, double hi) const {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    auto consider = [&](const PolyPiece& p, double x) {
        if (x < lo || x > hi || x < p.lo || x > p.hi) return;
        const double v = p.eval(x);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    };
    for (const auto& p : pieces_) {
        if (p.hi < lo || p.lo > hi) continue;
        consider(p, std::max(p.lo, lo));
        consider(p, std::min(p.hi, hi));
        // Interior critical points: roots of the derivative c1 + 2 c2 x + 3 c3 x^2.
        const double c1 = p.coeff[1], c2 = 2.0 * p.coeff[2], c3 = 3.0 * p.coeff[3];
        if (c3 != 0.0) {
            const double disc = c2 * c2 - 4.0 * c3 * c1;
            if (disc >= 0.0) {
                const double r = std::sqrt(disc);
                consider(p, (-c2 + r) / (2.0 * c3));
                consider(p, (-c2 - r) / (2.0 * c3));
            }
        } else if (c2 != 0.0) {
            consider(p, -c1 / c2);
        }
    }
    if (mn > mx) throw std::invalid_argument("PiecewisePoly::range: empty intersection");
    return {mn, mx};
}

double PiecewisePoly::max_abs(double lo, double hi) const {
    const auto [mn, mx] = range(lo, hi);
    return std::max(std::abs(mn), std::abs(mx));
}

// ------------------------------------------------------------------- Measure1D

Measure1D::Measure1D(std::vector<Atom> atoms, std::vector<Piece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
    for (const auto& a : atoms_)
        if (a.mass < 0.0 || !std::isfinite(a.mass) || !std::isfinite(a.loc))
            throw std::invalid_argument("Measure1D: bad atom (loc " + fmt17(a.loc) +
                                        ", mass " + fmt17(a.mass) + ")");
    for (const auto& p : pieces_)
        if (p.height < 0.0 || !(p.lo <= p.hi) || !std::isfinite(p.height))
            throw std::invalid_argument("Measure1D: bad piece [" + fmt17(p.lo) + ", " +
                                        fmt17(p.hi) + ") height " + fmt17(p.height));
    canonicalize();
}

Measure1D Measure1D::point(double loc, double mass) {
    return Measure1D({Atom{loc, mass}}, {});
}

Measure1D Measure1D::uniform(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("uniform: need a < b");
    return Measure1D({}, {Piece{a, b, 1.0 / (b - a)}});
}

Measure1D Measure1D::step_density(const std::vector<std::pair<double, double>>& intervals,
                                  double height) {
    std::vector<Piece> ps;
    ps.reserve(intervals.size());
    for (const auto& [a, b] : intervals) ps.push_back(Piece{a, b, height});
    return Measure1D({}, std::move(ps));
}

void Measure1D::canonicalize() {
    // Atoms: sort, merge within kCanonicalTol, drop zero mass.
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.loc < b.loc; });
    std::vector<Atom> merged;
    for (const auto& a : atoms_) {
        if (!merged.empty() && a.loc - merged.back().loc <= kCanonicalTol)
            merged.back().mass += a.mass;
        else
            merged.push_back(a);
    }
    std::erase_if(merged, [](const Atom& a) { return a.mass == 0.0; });
    atoms_ = std::move(merged);

    // Pieces: split at all endpoints, sum heights per elementary segment,
    // re-merge adjacent segments of exactly equal height.
    std::erase_if(pieces_, [](const Piece& p) { return p.height == 0.0 || p.lo >= p.hi; });
    if (pieces_.empty()) return;
    std::vector<double> cuts;
    cuts.reserve(2 * pieces_.size());
    for (const auto& p : pieces_) { cuts.push_back(p.lo); cuts.push_back(p.hi); }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Piece> out;
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    std::size_t first_candidate = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        double h = 0.0;
        while (first_candidate < pieces_.size() && pieces_[first_candidate].hi <= lo)
            ++first_candidate;
        for (std::size_t j = first_candidate; j < pieces_.size() && pieces_[j].lo < hi; ++j)
            if (pieces_[j].lo <= lo && hi <= pieces_[j].hi) h += pieces_[j].height;
        if (h == 0.0) continue;
        if (!out.empty() && out.back().hi == lo && out.back().height == h)
            out.back().hi = hi;
        else
            out.push_back(Piece{lo, hi, h});
    }
    pieces_ = std::move(out);
}

double Measure1D::total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.mass;
    for (const auto& p : pieces_) m += p.height * (p.hi - p.lo);
    return m;
}

void Measure1D::require_probability(const char* who) const {
    const double m = total_mass();
    if (std::abs(m - 1.0) > kCanonicalTol)
        throw std::invalid_argument(std::string(who) + ": measure is not normalized, total mass " +
                                    fmt17(m));
}

double Measure1D::mass_of(double a, double b) const {
    if (!(a < b)) return 0.0;
    double m = 0.0;
    for (const auto& at : atoms_)
        if (a <= at.loc && at.loc < b) m += at.mass;
    for (const auto& p : pieces_) {
        const double lo = std::max(p.lo, a), hi = std::min(p.hi, b);
        if (lo < hi) m += p.height * (hi - lo);
    }
    return m;
}

double Measure1D::support_lo() const {
    if (empty()) throw std::logic_error("support of the zero measure");
    double lo = std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) lo = atoms_.front().loc;
    if (!pieces_.empty()) lo = std::min(lo, pieces_.front().lo);
    return lo;
}

double Measure1D::support_hi() const {
    if (empty()) throw std::logic_error("support of the zero measure");
    double hi = -std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) hi = atoms_.back().loc;
    for (const auto& p : pieces_) hi = std::max(hi, p.hi);
    return hi;
}

double Measure1D::cdf(double x) const {
    double m = 0.0;
    for (const auto& a : atoms_)
        if (a.loc <= x) m += a.mass;
    for (const auto& p : pieces_) {
        if (x <= p.lo) continue;
        m += p.height * (std::min(x, p.hi) - p.lo);
    }
    return m;
}

void Measure1D::add_scaled(const Measure1D& other, double factor) {
    if (factor == 0.0) return;
    if (factor < 0.0) throw std::invalid_argument("add_scaled: negative factor");
    for (const auto& a : other.atoms_) atoms_.push_back(Atom{a.loc, a.mass * factor});
    for (const auto& p : other.pieces_) pieces_.push_back(Piece{p.lo, p.hi, p.height * factor});
    canonicalize();
}

bool Measure1D::operator==(const Measure1D& other) const {
    if (atoms_.size() != other.atoms_.size() || pieces_.size() != other.pieces_.size())
        return false;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i].loc != other.atoms_[i].loc || atoms_[i].mass != other.atoms_[i].mass)
            return false;
    for (std::size_t i = 0; i < pieces_.size(); ++i)
        if (pieces_[i].lo != other.pieces_[i].lo || pieces_[i].hi != other.pieces_[i].hi ||
            pieces_[i].height != other.pieces_[i].height)
            return false;
    return true;
}

std::string Measure1D::to_text() const {
    std::string s;
    for (const auto& a : atoms_)
        s += "atom " + fmt17(a.loc) + " " + fmt17(a.mass) + "\n";
    for (const auto& p : pieces_)
        s += "piece " + fmt17(p.lo) + " " + fmt17(p.hi) + " " + fmt17(p.height) + "\n";
    return s;
}

Measure1D Measure1D::from_text(const std::string& text) {
    std::vector<Atom> atoms;
    std::vector<Piece> pieces;
    std::istringstream in(text);
    std::string kind;
    while (in >> kind) {
        if (kind == "atom") {
            Atom a;
            if (!(in >> a.loc >> a.mass)) throw std::invalid_argument("measure text: bad atom line");
            atoms.push_back(a);
        } else if (kind == "piece") {
            Piece p;
            if (!(in >> p.lo >> p.hi >> p.height))
                throw std::invalid_argument("measure text: bad piece line");
            pieces.push_back(p);
        } else {
            throw std::invalid_argument("measure text: unknown record '" + kind + "'");
        }
    }
    return Measure1D(std::move(atoms), std::move(pieces));
}

// ------------------------------------------------------------------- distances

double tv_distance(const Measure1D& mu, const Measure1D& nu) {
    mu.require_probability("tv_distance (first argument)");
    nu.require_probability("tv_distance (second argument)");

    double tv = 0.0;
    // Atomic parts are mutually singular with the density parts, so the two
    // contributions separate exactly.
    std::size_t i = 0, j = 0;
    const auto& A = mu.atoms();
    const auto& B = nu.atoms();
    while (i < A.size() || j < B.size()) {
        if (j == B.size() || (i < A.size() && A[i].loc < B[j].loc - kCanonicalTol)) {
            tv += A[i++].mass;
        } else if (i == A.size() || B[j].loc < A[i].loc - kCanonicalTol) {
            tv += B[j++].mass;
        } else {
            tv += std::abs(A[i].mass - B[j].mass);
            ++i; ++j;
        }
    }
    const auto cuts = piece_breakpoints(mu, nu);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        tv += std::abs(density_at(mu, mid) - density_at(nu, mid)) * (cuts[k + 1] - cuts[k]);
    }
    return tv;
}

double w1_distance(const Measure1D& mu, const Measure1D& nu) {
    mu.require_probability("w1_distance (first argument)");
    nu.require_probability("w1_distance (second argument)");

    // Breakpoints of F_mu - F_nu: atom locations (jumps) and piece endpoints
    // (slope changes). Between consecutive breakpoints the difference is
    // affine, so each segment integrates in closed form.
    std::vector<double> pts = piece_breakpoints(mu, nu);
    for (const auto& a : mu.atoms()) pts.push_back(a.loc);
    for (const auto& a : nu.atoms()) pts.push_back(a.loc);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2) return 0.0;

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double lo = pts[k], hi = pts[k + 1];
        const double L = hi - lo;
        const double g0 = mu.cdf(lo) - nu.cdf(lo);   // right-continuous value at lo
        const double slope = density_at(mu, 0.5 * (lo + hi)) - density_at(nu, 0.5 * (lo + hi));
        const double g1 = g0 + slope * L;
        if (g0 == 0.0 && g1 == 0.0) continue;
        if (g0 * g1 >= 0.0) {
            total += 0.5 * (std::abs(g0) + std::abs(g1)) * L;
        } else {
            const double x0 = -g0 / slope;   // root inside (0, L)
            total += 0.5 * (std::abs(g0) * x0 + std::abs(g1) * (L - x0));
        }
    }
    return total;
}

double setwise_gap(const Measure1D& mu, const Measure1D& nu,
                   const std::vector<std::pair<double, double>>& family) {
    mu.require_probability("setwise_gap (first argument)");
    nu.require_probability("setwise_gap (second argument)");
    if (family.empty()) throw std::invalid_argument("setwise_gap: empty set family");
    double gap = 0.0;
    for (const auto& [a, b] : family)
        gap = std::max(gap, std::abs(mu.mass_of(a, b) - nu.mass_of(a, b)));
    return gap;
}

double integrate(const Measure1D& mu, const PiecewisePoly& f) {
    double sum = 0.0;
    for (const auto& a : mu.atoms()) sum += f.eval(a.loc) * a.mass;
    for (const auto& p : mu.pieces()) sum += p.height * f.integral(p.lo, p.hi);
    return sum;
}

Measure1D pushforward_affine(const Measure1D& mu, double scale, double shift) {
    if (scale == 0.0) throw std::invalid_argument("pushforward_affine: scale must be nonzero");
    std::vector<Atom> atoms;
    atoms.reserve(mu.atoms().size());
    for (const auto& a : mu.atoms()) atoms.push_back(Atom{scale * a.loc + shift, a.mass});
    std::vector<Piece> pieces;
    pieces.reserve(mu.pieces().size());
    for (const auto& p : mu.pieces()) {
        const double x = scale * p.lo + shift, y = scale * p.hi + shift;
        pieces.push_back(Piece{std::min(x, y), std::max(x, y), p.height / std::abs(scale)});
    }
    return Measure1D(std::move(atoms), std::move(pieces));
}

double sample(const Measure1D& mu, SplitMix64& rng) {
    mu.require_probability("sample");
    const double u = rng.next_double();
    // Inverse CDF: walk atoms and pieces in location order, splitting pieces
    // at interior atom locations.
    double cum = 0.0;
    std::size_t i = 0;
    const auto& atoms = mu.atoms();
    for (const auto& p : mu.pieces()) {
        for (; i < atoms.size() && atoms[i].loc <= p.lo; ++i) {
            cum += atoms[i].mass;
            if (u < cum) return atoms[i].loc;
        }
        double seg_lo = p.lo;
        for (; i < atoms.size() && atoms[i].loc < p.hi; ++i) {
            const double m = p.height * (atoms[i].loc - seg_lo);
            if (u < cum + m) return seg_lo + (u - cum) / p.height;
            cum += m + atoms[i].mass;
            if (u < cum) return atoms[i].loc;
            seg_lo = atoms[i].loc;
        }
        const double m = p.height * (p.hi - seg_lo);
        if (u < cum + m) return seg_lo + (u - cum) / p.height;
        cum += m;
    }
    for (; i < atoms.size(); ++i) {
        cum += atoms[i].mass;
        if (u < cum) return atoms[i].loc;
    }
    // u landed in the rounding slack past the last component.
    return mu.support_hi();
}

} // namespace kmlab

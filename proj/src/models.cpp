#include "kmlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace kmlab {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

double row_tv(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return s;
}

Measure1D row_as_measure(const std::vector<double>& p,
                         const std::vector<std::vector<double>>& labels) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != 0.0) atoms.push_back(Atom{labels[i][0], p[i]});
    return Measure1D(std::move(atoms), {});
}

void check_tabular_compatible(const TabularMDP& a, const TabularMDP& b, bool need_labels) {
    if (a.n_states() != b.n_states() || a.n_actions() != b.n_actions())
        throw std::invalid_argument("kernel distance: tabular models have different shapes");
    if (!need_labels) return;
    for (int x = 0; x < a.n_states(); ++x) {
        if (a.state_labels[x].size() != 1 || b.state_labels[x].size() != 1)
            throw std::invalid_argument("kernel_w1_sup: needs one-dimensional state labels");
        if (std::abs(a.state_labels[x][0] - b.state_labels[x][0]) > kStochasticTol)
            throw std::invalid_argument("kernel_w1_sup: state labels differ at index " +
                                        std::to_string(x));
    }
}

} // namespace

void normalize_probability_row(std::vector<double>& row) {
    double s = 0.0;
    for (double v : row) s += v;
    if (s <= 0.0) throw std::invalid_argument("normalize_probability_row: nonpositive row sum");
    for (double& v : row) v /= s;
    double s2 = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        s2 += row[i];
        if (row[i] > row[imax]) imax = i;
    }
    row[imax] += 1.0 - s2;   // push the rounding residual into the largest entry
}

// ------------------------------------------------------------- tabular models

double TabularMDP::cost_sup() const {
    double m = 0.0;
    for (const auto& row : cost)
        for (double c : row) m = std::max(m, std::abs(c));
    return m;
}

TabularPOMDP as_pomdp(const TabularMDP& m) {
    TabularPOMDP p;
    p.mdp = m;
    p.uninformative = false;
    const int n = m.n_states();
    p.channel.assign(n, std::vector<double>(n, 0.0));
    for (int x = 0; x < n; ++x) p.channel[x][x] = 1.0;
    return p;
}

TabularPOMDP uninformative_pomdp(const TabularMDP& m) {
    TabularPOMDP p;
    p.mdp = m;
    p.uninformative = true;
    p.channel.assign(m.n_states(), std::vector<double>{1.0});
    return p;
}

// -------------------------------------------------------------- region models

PiecewisePoly CostSpec::for_action(int action_index, double action_value,
                                   double state_lo, double state_hi) const {
    if (kind == Kind::SquaredError)
        return PiecewisePoly::squared_error(state_lo, state_hi, action_value);
    if (action_index < 0 || action_index >= static_cast<int>(per_action.size()))
        throw std::invalid_argument("CostSpec: action index " + std::to_string(action_index) +
                                    " outside the per-action table");
    return per_action[action_index];
}

double CostSpec::sup_norm(double state_lo, double state_hi,
                          const std::vector<double>& action_values) const {
    if (kind == Kind::PerAction) {
        double m = 0.0;
        for (const auto& poly : per_action) m = std::max(m, poly.max_abs(state_lo, state_hi));
        return m;
    }
    double m = 0.0;
    for (double u : action_values) {
        m = std::max(m, (state_lo - u) * (state_lo - u));
        m = std::max(m, (state_hi - u) * (state_hi - u));
    }
    return m;
}

int RegionModel::region_of(double x) const {
    for (int r = 0; r < n_regions(); ++r)
        for (double p : regions[r].points)
            if (p == x) return r;
    for (int r = 0; r < n_regions(); ++r)
        for (const auto& [lo, hi] : regions[r].intervals)
            if (lo <= x && x < hi) return r;
    return -1;
}

int RegionModel::action_index(double action_value) const {
    if (action_values.empty()) return -1;
    for (std::size_t i = 0; i < action_values.size(); ++i)
        if (std::abs(action_values[i] - action_value) <= kStochasticTol)
            return static_cast<int>(i);
    throw std::invalid_argument("RegionModel '" + name + "': action value " + fmt(action_value) +
                                " is not on the action grid");
}

double RegionModel::cost_sup() const {
    if (cost.kind == CostSpec::Kind::SquaredError && action_values.empty() && action_interval) {
        const std::vector<double> ends{action_interval->first, action_interval->second};
        return cost.sup_norm(state_lo, state_hi, ends);
    }
    return cost.sup_norm(state_lo, state_hi, action_values);
}

std::vector<double> RegionModel::breakpoints() const {
    std::vector<double> pts{state_lo, state_hi};
    for (const auto& r : regions) {
        for (const auto& [lo, hi] : r.intervals) { pts.push_back(lo); pts.push_back(hi); }
        for (double p : r.points) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// ------------------------------------------------------------------ validation

std::vector<std::string> validate(const TabularMDP& m) {
    std::vector<std::string> bad;
    const int nx = m.n_states(), nu = m.n_actions();
    if (nx == 0) { bad.push_back("model has no states"); return bad; }
    if (!(m.discount > 0.0 && m.discount < 1.0))
        bad.push_back("discount " + fmt(m.discount) + " outside (0,1)");
    if (static_cast<int>(m.state_labels.size()) != nx)
        bad.push_back("state_labels size mismatch");
    for (std::size_t i = 0; i < m.state_labels.size(); ++i)
        if (m.state_labels[i].empty() || m.state_labels[i].size() > 2)
            bad.push_back("state label " + std::to_string(i) + " must have 1 or 2 coordinates");
    if (static_cast<int>(m.action_labels.size()) != nu)
        bad.push_back("action_labels size mismatch");
    if (static_cast<int>(m.cost.size()) != nx)
        bad.push_back("cost matrix has wrong number of rows");
    for (int x = 0; x < nx && x < static_cast<int>(m.cost.size()); ++x) {
        if (static_cast<int>(m.cost[x].size()) != nu) {
            bad.push_back("cost row " + std::to_string(x) + " has wrong length");
            continue;
        }
        for (int u = 0; u < nu; ++u)
            if (!(m.cost[x][u] >= 0.0) || !std::isfinite(m.cost[x][u]))
                bad.push_back("cost(" + std::to_string(x) + "," + std::to_string(u) +
                              ") = " + fmt(m.cost[x][u]) + " is not finite and nonnegative");
    }
    for (int x = 0; x < nx; ++x) {
        if (static_cast<int>(m.kernel[x].size()) != nu) {
            bad.push_back("kernel row block " + std::to_string(x) + " has wrong action count");
            continue;
        }
        for (int u = 0; u < nu; ++u) {
            const auto& row = m.kernel[x][u];
            if (static_cast<int>(row.size()) != nx) {
                bad.push_back("kernel(" + std::to_string(x) + "," + std::to_string(u) +
                              ") has wrong length");
                continue;
            }
            double s = 0.0;
            bool neg = false;
            for (double v : row) { s += v; neg = neg || v < -kStochasticTol; }
            if (neg)
                bad.push_back("kernel(" + std::to_string(x) + "," + std::to_string(u) +
                              ") has a negative entry");
            if (std::abs(s - 1.0) > kStochasticTol)
                bad.push_back("kernel(" + std::to_string(x) + "," + std::to_string(u) +
                              ") sums to " + fmt(s));
        }
    }
    if (static_cast<int>(m.initial.size()) != nx) {
        bad.push_back("initial distribution has wrong length");
    } else {
        double s = 0.0;
        for (double v : m.initial) s += v;
        if (std::abs(s - 1.0) > kStochasticTol)
            bad.push_back("initial distribution sums to " + fmt(s));
    }
    return bad;
}

std::vector<std::string> validate(const TabularPOMDP& m) {
    std::vector<std::string> bad = validate(m.mdp);
    if (static_cast<int>(m.channel.size()) != m.mdp.n_states()) {
        bad.push_back("channel has wrong number of rows");
        return bad;
    }
    const int ny = m.n_obs();
    for (int x = 0; x < m.mdp.n_states(); ++x) {
        if (static_cast<int>(m.channel[x].size()) != ny) {
            bad.push_back("channel row " + std::to_string(x) + " has wrong length");
            continue;
        }
        double s = 0.0;
        for (double v : m.channel[x]) s += v;
        if (std::abs(s - 1.0) > kStochasticTol)
            bad.push_back("channel row " + std::to_string(x) + " sums to " + fmt(s));
    }
    if (m.uninformative && ny != 1)
        bad.push_back("uninformative channel must have exactly one observation");
    return bad;
}

std::vector<std::string> validate(const RegionModel& m) {
    std::vector<std::string> bad;
    if (!(m.state_lo < m.state_hi)) bad.push_back("state interval is empty");
    if (!(m.discount > 0.0 && m.discount < 1.0))
        bad.push_back("discount " + fmt(m.discount) + " outside (0,1)");
    if (m.regions.empty()) { bad.push_back("no regions"); return bad; }

    // Intervals across all regions must tile [state_lo, state_hi) without
    // gaps or overlaps; points must be distinct and cover whatever the
    // half-open intervals miss (in particular state_hi itself).
    struct Iv { double lo, hi; int region; };
    std::vector<Iv> ivs;
    std::set<double> pts;
    for (int r = 0; r < m.n_regions(); ++r) {
        for (const auto& [lo, hi] : m.regions[r].intervals) {
            if (!(lo < hi))
                bad.push_back("region '" + m.regions[r].name + "' has an empty interval");
            ivs.push_back(Iv{lo, hi, r});
        }
        for (double p : m.regions[r].points) {
            if (!pts.insert(p).second)
                bad.push_back("point " + fmt(p) + " listed by more than one region");
            if (p < m.state_lo || p > m.state_hi)
                bad.push_back("point " + fmt(p) + " outside the state interval");
        }
    }
    std::sort(ivs.begin(), ivs.end(), [](const Iv& a, const Iv& b) { return a.lo < b.lo; });
    double cur = m.state_lo;
    for (const auto& iv : ivs) {
        if (iv.lo < cur - kCanonicalTol)
            bad.push_back("regions '" + m.regions[iv.region].name + "' overlap near " + fmt(iv.lo));
        else if (iv.lo > cur + kCanonicalTol)
            bad.push_back("partition gap on [" + fmt(cur) + ", " + fmt(iv.lo) + ")");
        cur = std::max(cur, iv.hi);
    }
    if (cur < m.state_hi - kCanonicalTol)
        bad.push_back("partition gap on [" + fmt(cur) + ", " + fmt(m.state_hi) + ")");
    if (m.region_of(m.state_hi) < 0)
        bad.push_back("right endpoint " + fmt(m.state_hi) + " not assigned to any region");

    const std::size_t cols = m.action_values.empty() ? 1 : m.action_values.size();
    if (m.kernel.size() != m.regions.size()) {
        bad.push_back("kernel table has wrong number of region rows");
        return bad;
    }
    for (int r = 0; r < m.n_regions(); ++r) {
        if (m.kernel[r].size() != cols && m.kernel[r].size() != 1) {
            bad.push_back("kernel row for region '" + m.regions[r].name +
                          "' has wrong number of action columns");
            continue;
        }
        for (std::size_t a = 0; a < m.kernel[r].size(); ++a) {
            const auto& mu = m.kernel[r][a];
            const double mass = mu.total_mass();
            if (std::abs(mass - 1.0) > kStochasticTol)
                bad.push_back("kernel(" + m.regions[r].name + ", action " + std::to_string(a) +
                              ") has mass " + fmt(mass));
            if (!mu.empty() &&
                (mu.support_lo() < m.state_lo - kCanonicalTol ||
                 mu.support_hi() > m.state_hi + kCanonicalTol))
                bad.push_back("kernel(" + m.regions[r].name + ", action " + std::to_string(a) +
                              ") supported outside the state interval");
        }
    }
    if (m.cost.kind == CostSpec::Kind::PerAction &&
        m.cost.per_action.size() != m.action_values.size())
        bad.push_back("per-action cost table does not match the action grid");
    if (!m.initial.empty()) {
        const double mass = m.initial.total_mass();
        if (std::abs(mass - 1.0) > kStochasticTol)
            bad.push_back("initial measure has mass " + fmt(mass));
    } else {
        bad.push_back("initial measure missing");
    }
    return bad;
}

std::vector<std::string> validate(const AdditiveNoiseModel& m) {
    std::vector<std::string> bad;
    if (!(m.state_lo < m.state_hi)) bad.push_back("state interval is empty");
    if (m.action_values.empty()) bad.push_back("empty action grid");
    if (m.drift.size() != m.action_values.size())
        bad.push_back("drift table does not match the action grid");
    if (m.noise.empty()) {
        bad.push_back("noise measure missing");
        return bad;
    }
    const double w_lo = m.noise.support_lo(), w_hi = m.noise.support_hi();
    for (std::size_t a = 0; a < m.drift.size(); ++a) {
        if (!m.drift[a].defined_at(m.state_lo) || !m.drift[a].defined_at(m.state_hi)) {
            bad.push_back("drift for action " + std::to_string(a) +
                          " is not defined on the whole state interval");
            continue;
        }
        // Range of drift + noise must stay inside the state interval.
        const auto [dlo, dhi] = m.drift[a].range(m.state_lo, m.state_hi);
        if (dlo + w_lo < m.state_lo - kCanonicalTol || dhi + w_hi > m.state_hi + kCanonicalTol)
            bad.push_back("drift for action " + std::to_string(a) +
                          " pushes mass outside the state interval (range [" + fmt(dlo + w_lo) +
                          ", " + fmt(dhi + w_hi) + "])");
    }
    return bad;
}

// ----------------------------------------------------------- kernel distances

double kernel_tv_sup(const TabularMDP& a, const TabularMDP& b) {
    check_tabular_compatible(a, b, false);
    double sup = 0.0;
    for (int x = 0; x < a.n_states(); ++x)
        for (int u = 0; u < a.n_actions(); ++u)
            sup = std::max(sup, row_tv(a.kernel[x][u], b.kernel[x][u]));
    return sup;
}

double kernel_w1_sup(const TabularMDP& a, const TabularMDP& b) {
    check_tabular_compatible(a, b, true);
    double sup = 0.0;
    for (int x = 0; x < a.n_states(); ++x)
        for (int u = 0; u < a.n_actions(); ++u)
            sup = std::max(sup, w1_distance(row_as_measure(a.kernel[x][u], a.state_labels),
                                            row_as_measure(b.kernel[x][u], b.state_labels)));
    return sup;
}

namespace {

// Distinct (region of a, region of b) cells of the common refinement,
// detected by sampling memberships at every breakpoint and every open-segment
// midpoint (membership is constant between breakpoints).
std::vector<std::pair<int, int>> refinement_cells(const RegionModel& a, const RegionModel& b) {
    std::vector<double> pts = a.breakpoints();
    const auto pb = b.breakpoints();
    pts.insert(pts.end(), pb.begin(), pb.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::set<std::pair<int, int>> cells;
    auto probe = [&](double x) {
        const int ra = a.region_of(x), rb = b.region_of(x);
        if (ra >= 0 && rb >= 0) cells.insert({ra, rb});
    };
    for (double p : pts) probe(p);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) probe(0.5 * (pts[i] + pts[i + 1]));
    return {cells.begin(), cells.end()};
}

int shared_action_columns(const RegionModel& a, const RegionModel& b) {
    const int ca = a.action_independent() ? 1 : static_cast<int>(a.action_values.size());
    const int cb = b.action_independent() ? 1 : static_cast<int>(b.action_values.size());
    if (ca > 1 && cb > 1) {
        if (a.action_values.size() != b.action_values.size())
            throw std::invalid_argument("kernel distance: region models have different action grids");
        for (std::size_t i = 0; i < a.action_values.size(); ++i)
            if (std::abs(a.action_values[i] - b.action_values[i]) > kStochasticTol)
                throw std::invalid_argument(
                    "kernel distance: region models have different action grids");
    }
    return std::max(ca, cb);
}

template <typename Dist>
double region_sup(const RegionModel& a, const RegionModel& b, Dist dist) {
    if (std::abs(a.state_lo - b.state_lo) > kCanonicalTol ||
        std::abs(a.state_hi - b.state_hi) > kCanonicalTol)
        throw std::invalid_argument("kernel distance: region models have different state intervals");
    const int cols = shared_action_columns(a, b);
    double sup = 0.0;
    for (const auto& [ra, rb] : refinement_cells(a, b)) {
        for (int u = 0; u < cols; ++u) {
            const auto& ka = a.kernel[ra][a.action_independent() ? 0 : u];
            const auto& kb = b.kernel[rb][b.action_independent() ? 0 : u];
            sup = std::max(sup, dist(ka, kb));
        }
    }
    return sup;
}

} // namespace

double kernel_tv_sup(const RegionModel& a, const RegionModel& b) {
    return region_sup(a, b, [](const Measure1D& x, const Measure1D& y) {
        return tv_distance(x, y);
    });
}

double kernel_w1_sup(const RegionModel& a, const RegionModel& b) {
    return region_sup(a, b, [](const Measure1D& x, const Measure1D& y) {
        return w1_distance(x, y);
    });
}

// -------------------------------------------------------------------- discretize

DiscretizeResult discretize(const AdditiveNoiseModel& m, int n_bins, const CostSpec* cost,
                            const Measure1D* initial, double discount, double defect_threshold) {
    if (n_bins < 1) throw std::invalid_argument("discretize: need at least one bin");
    const auto diag = validate(m);
    if (!diag.empty()) throw std::invalid_argument("discretize: invalid model: " + diag.front());

    const double h = (m.state_hi - m.state_lo) / n_bins;
    const int nu = m.n_actions();
    DiscretizeResult out;
    TabularMDP& t = out.mdp;
    t.discount = discount;
    t.action_labels = m.action_values;
    t.state_labels.reserve(n_bins);
    for (int k = 0; k < n_bins; ++k)
        t.state_labels.push_back({m.state_lo + (k + 0.5) * h});

    t.kernel.assign(n_bins, std::vector<std::vector<double>>(nu, std::vector<double>(n_bins, 0.0)));
    t.cost.assign(n_bins, std::vector<double>(nu, 0.0));
    const double hi_closed = std::nextafter(m.state_hi, std::numeric_limits<double>::infinity());
    for (int k = 0; k < n_bins; ++k) {
        const double mid = t.state_labels[k][0];
        for (int u = 0; u < nu; ++u) {
            const Measure1D next = pushforward_affine(m.noise, 1.0, m.drift_at(mid, u));
            auto& row = t.kernel[k][u];
            for (int j = 0; j < n_bins; ++j) {
                const double lo = m.state_lo + j * h;
                const double hi = (j + 1 == n_bins) ? hi_closed : m.state_lo + (j + 1) * h;
                row[j] = next.mass_of(lo, hi);
            }
            double s = 0.0;
            for (double v : row) s += v;
            const double defect = std::abs(1.0 - s);
            out.max_renormalization_defect = std::max(out.max_renormalization_defect, defect);
            if (defect > defect_threshold)
                throw std::invalid_argument("discretize: bin mass defect " + fmt(defect) +
                                            " at state " + std::to_string(k) + ", action " +
                                            std::to_string(u));
            normalize_probability_row(row);
            if (cost)
                t.cost[k][u] = cost->for_action(u, m.action_values[u], m.state_lo, m.state_hi)
                                   .eval(mid);
        }
    }

    t.initial.assign(n_bins, 1.0 / n_bins);
    if (initial) {
        for (int j = 0; j < n_bins; ++j) {
            const double lo = m.state_lo + j * h;
            const double hi = (j + 1 == n_bins) ? hi_closed : m.state_lo + (j + 1) * h;
            t.initial[j] = initial->mass_of(lo, hi);
        }
        normalize_probability_row(t.initial);
    } else {
        normalize_probability_row(t.initial);
    }
    return out;
}

// ----------------------------------------------------------------------- JSON

namespace {

using nlohmann::json;

json poly_to_json(const PiecewisePoly& p) {
    json pieces = json::array();
    for (const auto& pc : p.pieces())
        pieces.push_back({{"lo", pc.lo},
                          {"hi", pc.hi},
                          {"coeff", {pc.coeff[0], pc.coeff[1], pc.coeff[2], pc.coeff[3]}}});
    return {{"pieces", pieces}};
}

PiecewisePoly poly_from_json(const json& j) {
    std::vector<PolyPiece> pieces;
    for (const auto& pc : j.at("pieces")) {
        PolyPiece p;
        p.lo = pc.at("lo").get<double>();
        p.hi = pc.at("hi").get<double>();
        const auto& c = pc.at("coeff");
        for (int i = 0; i < 4; ++i) p.coeff[i] = c.at(i).get<double>();
        pieces.push_back(p);
    }
    return PiecewisePoly(std::move(pieces));
}

json mdp_to_json_obj(const TabularMDP& m) {
    return {{"schema_version", 1},
            {"type", "tabular_mdp"},
            {"state_labels", m.state_labels},
            {"action_labels", m.action_labels},
            {"kernel", m.kernel},
            {"cost", m.cost},
            {"discount", m.discount},
            {"initial", m.initial}};
}

TabularMDP mdp_from_json_obj(const json& j) {
    if (!j.contains("schema_version"))
        throw std::invalid_argument("model file: missing schema_version");
    TabularMDP m;
    m.state_labels = j.at("state_labels").get<std::vector<std::vector<double>>>();
    m.action_labels = j.at("action_labels").get<std::vector<double>>();
    m.kernel = j.at("kernel").get<std::vector<std::vector<std::vector<double>>>>();
    m.cost = j.at("cost").get<std::vector<std::vector<double>>>();
    m.discount = j.at("discount").get<double>();
    m.initial = j.at("initial").get<std::vector<double>>();
    return m;
}

} // namespace

std::string to_json(const TabularMDP& m) { return mdp_to_json_obj(m).dump(2) + "\n"; }

TabularMDP tabular_mdp_from_json(const std::string& text) {
    return mdp_from_json_obj(json::parse(text));
}

std::string to_json(const TabularPOMDP& m) {
    json j{{"schema_version", 1},
           {"type", "tabular_pomdp"},
           {"mdp", mdp_to_json_obj(m.mdp)},
           {"channel", m.channel},
           {"uninformative", m.uninformative}};
    return j.dump(2) + "\n";
}

TabularPOMDP tabular_pomdp_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("schema_version"))
        throw std::invalid_argument("model file: missing schema_version");
    TabularPOMDP p;
    p.mdp = mdp_from_json_obj(j.at("mdp"));
    p.channel = j.at("channel").get<std::vector<std::vector<double>>>();
    p.uninformative = j.at("uninformative").get<bool>();
    return p;
}

std::string to_json(const RegionModel& m) {
    json regions = json::array();
    for (const auto& r : m.regions) {
        json ivs = json::array();
        for (const auto& [lo, hi] : r.intervals) ivs.push_back({lo, hi});
        regions.push_back({{"name", r.name}, {"intervals", ivs}, {"points", r.points}});
    }
    json kernel = json::array();
    for (const auto& row : m.kernel) {
        json cols = json::array();
        for (const auto& mu : row) cols.push_back(mu.to_text());
        kernel.push_back(cols);
    }
    json actions;
    if (m.action_interval)
        actions = {{"kind", "interval"},
                   {"lo", m.action_interval->first},
                   {"hi", m.action_interval->second},
                   {"values", m.action_values}};
    else
        actions = {{"kind", "grid"}, {"values", m.action_values}};
    json cost;
    if (m.cost.kind == CostSpec::Kind::SquaredError) {
        cost = {{"kind", "squared_error"}};
    } else {
        json polys = json::array();
        for (const auto& p : m.cost.per_action) polys.push_back(poly_to_json(p));
        cost = {{"kind", "per_action"}, {"polys", polys}};
    }
    json j{{"schema_version", 1},
           {"type", "region_model"},
           {"name", m.name},
           {"state_interval", {m.state_lo, m.state_hi}},
           {"regions", regions},
           {"actions", actions},
           {"kernel", kernel},
           {"cost", cost},
           {"discount", m.discount},
           {"initial", m.initial.to_text()},
           {"channel", m.channel_tag == ChannelTag::Full ? "full" : "uninformative"},
           {"assumption_profile",
            {{"weakly_continuous_kernel", m.assumption_profile.weakly_continuous_kernel},
             {"tv_continuous_channel", m.assumption_profile.tv_continuous_channel},
             {"continuous_bounded_cost", m.assumption_profile.continuous_bounded_cost},
             {"compact_actions", m.assumption_profile.compact_actions},
             {"note", m.assumption_profile.note}}}};
    return j.dump(2) + "\n";
}

RegionModel region_model_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("schema_version"))
        throw std::invalid_argument("model file: missing schema_version");
    RegionModel m;
    m.name = j.at("name").get<std::string>();
    m.state_lo = j.at("state_interval").at(0).get<double>();
    m.state_hi = j.at("state_interval").at(1).get<double>();
    for (const auto& jr : j.at("regions")) {
        Region r;
        r.name = jr.at("name").get<std::string>();
        for (const auto& iv : jr.at("intervals"))
            r.intervals.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
        r.points = jr.at("points").get<std::vector<double>>();
        m.regions.push_back(std::move(r));
    }
    const auto& actions = j.at("actions");
    m.action_values = actions.at("values").get<std::vector<double>>();
    if (actions.at("kind").get<std::string>() == "interval")
        m.action_interval = {actions.at("lo").get<double>(), actions.at("hi").get<double>()};
    for (const auto& row : j.at("kernel")) {
        std::vector<Measure1D> cols;
        for (const auto& cell : row) cols.push_back(Measure1D::from_text(cell.get<std::string>()));
        m.kernel.push_back(std::move(cols));
    }
    const auto& cost = j.at("cost");
    if (cost.at("kind").get<std::string>() == "squared_error") {
        m.cost = CostSpec::squared_error();
    } else {
        std::vector<PiecewisePoly> polys;
        for (const auto& p : cost.at("polys")) polys.push_back(poly_from_json(p));
        m.cost = CostSpec::per_action_polys(std::move(polys));
    }
    m.discount = j.at("discount").get<double>();
    m.initial = Measure1D::from_text(j.at("initial").get<std::string>());
    m.channel_tag = j.at("channel").get<std::string>() == "full" ? ChannelTag::Full
                                                                 : ChannelTag::Uninformative;
    const auto& ap = j.at("assumption_profile");
    m.assumption_profile.weakly_continuous_kernel = ap.at("weakly_continuous_kernel").get<bool>();
    m.assumption_profile.tv_continuous_channel = ap.at("tv_continuous_channel").get<bool>();
    m.assumption_profile.continuous_bounded_cost = ap.at("continuous_bounded_cost").get<bool>();
    m.assumption_profile.compact_actions = ap.at("compact_actions").get<bool>();
    m.assumption_profile.note = ap.at("note").get<std::string>();
    return m;
}

std::vector<std::string> validate_model_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("schema_version")) return {"model file: missing schema_version"};
    const std::string type = j.value("type", "");
    if (type == "tabular_mdp") return validate(tabular_mdp_from_json(text));
    if (type == "tabular_pomdp") return validate(tabular_pomdp_from_json(text));
    if (type == "region_model") return validate(region_model_from_json(text));
    return {"model file: unknown type '" + type + "'"};
}

} // namespace kmlab

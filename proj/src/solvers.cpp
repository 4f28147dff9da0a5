#include "kmlab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace kmlab {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

int region_index_at(const std::vector<Region>& regions, double x) {
    for (std::size_t r = 0; r < regions.size(); ++r)
        for (double p : regions[r].points)
            if (p == x) return static_cast<int>(r);
    for (std::size_t r = 0; r < regions.size(); ++r)
        for (const auto& [lo, hi] : regions[r].intervals)
            if (lo <= x && x < hi) return static_cast<int>(r);
    return -1;
}

} // namespace

int truncation_horizon(double cost_sup, double beta, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("truncation_horizon: tol must be positive");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("truncation_horizon: beta outside (0,1)");
    if (cost_sup <= 0.0) return 0;
    const double target = tol * (1.0 - beta) / cost_sup;   // need beta^(H+1) <= target
    if (target >= 1.0) return 0;
    int h = std::max(0, static_cast<int>(std::ceil(std::log(target) / std::log(beta))) - 1);
    while (cost_sup * std::pow(beta, h + 1) / (1.0 - beta) > tol) ++h;
    return h;
}

// ------------------------------------------------------------------ tabular MDP

ValueIterationResult value_iterate(const TabularMDP& m, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("value_iterate: tol must be positive");
    const int nx = m.n_states(), nu = m.n_actions();
    const double beta = m.discount;
    const double csup = m.cost_sup();

    // A-priori bound: beta^k * ||c||/(1-beta) <= tol.
    long max_iters = 1;
    if (csup > 0.0) {
        const double target = tol * (1.0 - beta) / csup;
        if (target < 1.0)
            max_iters = static_cast<long>(std::ceil(std::log(target) / std::log(beta))) + 1;
    }
    const double gap_stop = tol * (1.0 - beta) / beta;

    ValueIterationResult res;
    std::vector<double> v(nx, 0.0), next(nx, 0.0);
    res.policy.action.assign(nx, 0);
    for (long k = 0; k < max_iters; ++k) {
        double gap = 0.0;
        for (int x = 0; x < nx; ++x) {
            double best = std::numeric_limits<double>::infinity();
            int best_u = 0;
            for (int u = 0; u < nu; ++u) {
                double q = m.cost[x][u];
                const auto& row = m.kernel[x][u];
                for (int y = 0; y < nx; ++y) q += beta * row[y] * v[y];
                if (q < best) { best = q; best_u = u; }
            }
            next[x] = best;
            res.policy.action[x] = best_u;
            gap = std::max(gap, std::abs(next[x] - v[x]));
        }
        std::swap(v, next);
        res.gaps.push_back(gap);
        ++res.iterations;
        if (gap <= gap_stop) break;
    }
    res.value = std::move(v);
    res.certified_error = tol;
    return res;
}

std::vector<double> evaluate_policy_exact(const TabularMDP& m, const StationaryPolicy& pi) {
    const int n = m.n_states();
    if (static_cast<int>(pi.action.size()) != n)
        throw std::invalid_argument("evaluate_policy_exact: policy does not cover all states");
    for (int x = 0; x < n; ++x)
        if (pi.action[x] < 0 || pi.action[x] >= m.n_actions())
            throw std::invalid_argument("evaluate_policy_exact: action index out of range at state " +
                                        std::to_string(x));

    // A = I - beta P_pi, b = c_pi; Gaussian elimination with partial pivoting.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (int x = 0; x < n; ++x) {
        const auto& row = m.kernel[x][pi.action[x]];
        for (int y = 0; y < n; ++y) a[x][y] = (x == y ? 1.0 : 0.0) - m.discount * row[y];
        a[x][n] = m.cost[x][pi.action[x]];
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0)
            throw std::runtime_error("evaluate_policy_exact: singular system");
        std::swap(a[col], a[piv]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int cc = col; cc <= n; ++cc) a[r][cc] -= f * a[col][cc];
        }
    }
    std::vector<double> v(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = a[r][n];
        for (int cc = r + 1; cc < n; ++cc) s -= a[r][cc] * v[cc];
        v[r] = s / a[r][r];
    }

    // Residual check against the original system.
    double resid = 0.0;
    for (int x = 0; x < n; ++x) {
        double s = v[x] - m.cost[x][pi.action[x]];
        const auto& row = m.kernel[x][pi.action[x]];
        for (int y = 0; y < n; ++y) s -= m.discount * row[y] * v[y];
        resid = std::max(resid, std::abs(s));
    }
    if (resid > 1e-10)
        throw std::runtime_error("evaluate_policy_exact: residual " + fmt(resid) +
                                 " exceeds 1e-10");
    return v;
}

double expected_value(const std::vector<double>& dist, const std::vector<double>& v) {
    if (dist.size() != v.size())
        throw std::invalid_argument("expected_value: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) s += dist[i] * v[i];
    return s;
}

// ---------------------------------------------------------------- region models

int RegionPolicyStep::region_of(double x) const { return region_index_at(regions, x); }

namespace {

// Measure split into (model region, policy region) parts. Sub-pieces keep the
// exact endpoints of the breakpoint grid, so downstream integrals are exact.
std::map<std::pair<int, int>, Measure1D> split_measure(const Measure1D& mu, const RegionModel& m,
                                                       const RegionPolicyStep& step) {
    std::vector<double> pts = m.breakpoints();
    for (const auto& r : step.regions) {
        for (const auto& [lo, hi] : r.intervals) { pts.push_back(lo); pts.push_back(hi); }
        for (double p : r.points) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto classify = [&](double x) -> std::pair<int, int> {
        const int r = m.region_of(x);
        const int q = step.region_of(x);
        if (r < 0)
            throw std::invalid_argument("evaluate_region_policy: state " + fmt(x) +
                                        " lies outside every model region");
        if (q < 0)
            throw std::invalid_argument(
                "evaluate_region_policy: policy is not defined at state " + fmt(x) +
                " (not measurable w.r.t. the region refinement)");
        return {r, q};
    };

    struct Raw {
        std::vector<Atom> atoms;
        std::vector<Piece> pieces;
    };
    std::map<std::pair<int, int>, Raw> raw;
    for (const auto& a : mu.atoms()) raw[classify(a.loc)].atoms.push_back(a);
    for (const auto& p : mu.pieces()) {
        // Split [p.lo, p.hi) at the breakpoints strictly inside it.
        auto it = std::upper_bound(pts.begin(), pts.end(), p.lo);
        double lo = p.lo;
        while (lo < p.hi) {
            double hi = p.hi;
            if (it != pts.end() && *it < p.hi) hi = *it++;
            raw[classify(0.5 * (lo + hi))].pieces.push_back(Piece{lo, hi, p.height});
            lo = hi;
        }
    }
    std::map<std::pair<int, int>, Measure1D> out;
    for (auto& [key, r] : raw) out.emplace(key, Measure1D(std::move(r.atoms), std::move(r.pieces)));
    return out;
}

} // namespace

RegionEvalResult evaluate_region_policy(const RegionModel& m, const RegionPolicy& pi,
                                        double tol) {
    if (pi.schedule.empty())
        throw std::invalid_argument("evaluate_region_policy: empty policy schedule");
    const double csup = m.cost_sup();
    const int H = truncation_horizon(csup, m.discount, tol);

    RegionEvalResult res;
    res.horizon = H;
    res.tail_bound = csup * std::pow(m.discount, H + 1) / (1.0 - m.discount);

    Measure1D mu = m.initial;
    double beta_t = 1.0;
    for (int t = 0; t <= H; ++t) {
        const RegionPolicyStep& step =
            pi.schedule[std::min<std::size_t>(t, pi.schedule.size() - 1)];
        const auto parts = split_measure(mu, m, step);

        double stage = 0.0;
        std::map<std::pair<int, int>, double> group_mass;   // (region, kernel column)
        for (const auto& [key, part] : parts) {
            const auto& [r, q] = key;
            const double action_value = step.actions.at(q);
            const int idx = m.action_index(action_value);
            stage += integrate(part, m.cost.for_action(idx, action_value, m.state_lo, m.state_hi));
            if (t < H) {
                const int col = m.action_independent() ? 0 : idx;
                if (col < 0)
                    throw std::invalid_argument(
                        "evaluate_region_policy: action value " + fmt(action_value) +
                        " is not on the model's action grid");
                group_mass[{r, col}] += part.total_mass();
            }
        }
        res.value += beta_t * stage;
        beta_t *= m.discount;
        if (t == H) break;

        Measure1D next;
        for (const auto& [cell, mass] : group_mass) next.add_scaled(m.kernel[cell.first][cell.second], mass);
        mu = std::move(next);
    }
    return res;
}

// --------------------------------------------------------------------- POMDPs

std::size_t HistoryPolicy::tree_size(int n_obs, int levels) {
    // Saturates far above any usable budget so deep wide trees cannot wrap.
    constexpr std::size_t kCap = std::size_t{1} << 48;
    std::size_t total = 0, level = 1;
    for (int l = 0; l < levels; ++l) {
        if (level >= kCap / static_cast<std::size_t>(n_obs)) return kCap;
        level *= static_cast<std::size_t>(n_obs);
        total += level;
        if (total >= kCap) return kCap;
    }
    return total;
}

HistoryPolicy HistoryPolicy::constant(int n_obs, int levels, int action) {
    HistoryPolicy p;
    p.n_obs = n_obs;
    p.levels = levels;
    p.actions.assign(tree_size(n_obs, levels), action);
    p.default_action = action;
    return p;
}

HistoryPolicy HistoryPolicy::random(int n_obs, int levels, int n_actions, SplitMix64& rng) {
    HistoryPolicy p;
    p.n_obs = n_obs;
    p.levels = levels;
    p.actions.resize(tree_size(n_obs, levels));
    for (auto& a : p.actions) a = static_cast<int>(rng.next_below(n_actions));
    return p;
}

std::size_t HistoryPolicy::node_index(const std::vector<int>& h) const {
    // Offset of level L (histories of length L) is sum_{l<L} n_obs^l over l>=1.
    std::size_t offset = 0, level = 1;
    for (std::size_t l = 1; l < h.size(); ++l) {
        level *= static_cast<std::size_t>(n_obs);
        offset += level;
    }
    std::size_t idx = 0;
    for (int y : h) idx = idx * static_cast<std::size_t>(n_obs) + static_cast<std::size_t>(y);
    return offset + idx;
}

int HistoryPolicy::action_at(const std::vector<int>& h) const {
    if (h.empty()) throw std::invalid_argument("HistoryPolicy: empty history");
    if (static_cast<int>(h.size()) > levels) return default_action;
    return actions[node_index(h)];
}

namespace {

using BeliefMemoLevel = std::map<std::vector<long long>, std::pair<double, int>>;

std::vector<long long> belief_key(const std::vector<double>& z) {
    // Rounding to 1e-10 deduplicates beliefs reached along different histories.
    std::vector<long long> k(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) k[i] = std::llround(z[i] * 1e10);
    return k;
}

struct BeliefDP {
    const TabularPOMDP& m;
    int horizon;
    std::size_t node_budget;
    std::vector<BeliefMemoLevel> memo;
    std::size_t nodes = 0;

    BeliefDP(const TabularPOMDP& mm, int h, std::size_t budget)
        : m(mm), horizon(h), node_budget(budget), memo(h + 1) {}

    // Value-to-go from stage t at belief z (costs discounted relative to t).
    double value(int t, const std::vector<double>& z) {
        if (t > horizon) return 0.0;
        auto key = belief_key(z);
        auto it = memo[t].find(key);
        if (it != memo[t].end()) return it->second.first;
        if (++nodes > node_budget)
            throw std::runtime_error(
                "solve_pomdp_belief_tree: node budget " + std::to_string(node_budget) +
                " exceeded (required horizon " + std::to_string(horizon) + ")");

        const int nx = m.mdp.n_states(), nu = m.mdp.n_actions(), ny = m.n_obs();
        double best = std::numeric_limits<double>::infinity();
        int best_u = 0;
        std::vector<double> pred(nx), w(nx);
        for (int u = 0; u < nu; ++u) {
            double q = 0.0;
            for (int x = 0; x < nx; ++x) q += z[x] * m.mdp.cost[x][u];
            if (t < horizon) {
                std::fill(pred.begin(), pred.end(), 0.0);
                for (int x = 0; x < nx; ++x) {
                    if (z[x] == 0.0) continue;
                    const auto& row = m.mdp.kernel[x][u];
                    for (int y2 = 0; y2 < nx; ++y2) pred[y2] += z[x] * row[y2];
                }
                for (int y = 0; y < ny; ++y) {
                    double py = 0.0;
                    for (int x2 = 0; x2 < nx; ++x2) {
                        w[x2] = pred[x2] * m.channel[x2][y];
                        py += w[x2];
                    }
                    if (py <= 0.0) continue;
                    std::vector<double> z2(nx);
                    for (int x2 = 0; x2 < nx; ++x2) z2[x2] = w[x2] / py;
                    q += m.mdp.discount * py * value(t + 1, z2);
                }
            }
            if (q < best) { best = q; best_u = u; }
        }
        memo[t][key] = {best, best_u};
        return best;
    }

    int greedy(int t, const std::vector<double>& z) {
        value(t, z);
        return memo[t][belief_key(z)].second;
    }
};

} // namespace

BeliefSolveResult solve_pomdp_belief_tree(const TabularPOMDP& m, const BeliefSolveOptions& opt) {
    if (opt.tol <= 0.0) throw std::invalid_argument("solve_pomdp_belief_tree: tol must be positive");
    const auto diag = validate(m);
    if (!diag.empty())
        throw std::invalid_argument("solve_pomdp_belief_tree: invalid model: " + diag.front());

    const int nx = m.mdp.n_states(), ny = m.n_obs();
    const int H = truncation_horizon(m.mdp.cost_sup(), m.mdp.discount, opt.tol);
    BeliefDP dp(m, H, opt.node_budget);

    BeliefSolveResult res;
    res.horizon = H;
    res.tail_bound = m.mdp.cost_sup() * std::pow(m.mdp.discount, H + 1) / (1.0 - m.mdp.discount);

    // Initial observation: belief z0(y0) and its probability.
    std::vector<std::vector<double>> z0(ny, std::vector<double>(nx, 0.0));
    std::vector<double> p0(ny, 0.0);
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            z0[y][x] = m.mdp.initial[x] * m.channel[x][y];
            p0[y] += z0[y][x];
        }
        if (p0[y] > 0.0)
            for (int x = 0; x < nx; ++x) z0[y][x] /= p0[y];
    }
    for (int y = 0; y < ny; ++y)
        if (p0[y] > 0.0) res.value += p0[y] * dp.value(0, z0[y]);

    // Materialize the greedy tree to whatever depth fits the policy budget.
    int levels = H + 1;
    while (levels > 0 && HistoryPolicy::tree_size(ny, levels) > opt.policy_node_budget) --levels;
    res.policy.n_obs = ny;
    res.policy.levels = levels;
    res.policy.default_action = 0;
    res.policy.actions.assign(HistoryPolicy::tree_size(ny, levels), 0);
    res.policy_levels = levels;

    struct Walker {
        BeliefDP& dp;
        const TabularPOMDP& m;
        HistoryPolicy& pol;
        int levels;

        void walk(int t, const std::vector<double>& z, std::vector<int>& hist) {
            if (t >= levels || t > dp.horizon) return;
            const int u = dp.greedy(t, z);
            pol.actions[pol.node_index(hist)] = u;
            if (t + 1 >= levels || t + 1 > dp.horizon) return;
            const int nx = m.mdp.n_states(), ny = m.n_obs();
            std::vector<double> pred(nx, 0.0);
            for (int x = 0; x < nx; ++x) {
                if (z[x] == 0.0) continue;
                const auto& row = m.mdp.kernel[x][u];
                for (int y2 = 0; y2 < nx; ++y2) pred[y2] += z[x] * row[y2];
            }
            for (int y = 0; y < ny; ++y) {
                double py = 0.0;
                std::vector<double> z2(nx);
                for (int x2 = 0; x2 < nx; ++x2) {
                    z2[x2] = pred[x2] * m.channel[x2][y];
                    py += z2[x2];
                }
                if (py <= 0.0) continue;
                for (int x2 = 0; x2 < nx; ++x2) z2[x2] /= py;
                hist.push_back(y);
                walk(t + 1, z2, hist);
                hist.pop_back();
            }
        }
    } walker{dp, m, res.policy, levels};

    std::vector<int> hist;
    for (int y = 0; y < ny; ++y) {
        if (p0[y] <= 0.0) continue;
        hist.assign(1, y);
        walker.walk(0, z0[y], hist);
    }
    res.node_count = dp.nodes;
    return res;
}

HistoryEvalResult evaluate_history_policy(const TabularPOMDP& m, const HistoryPolicy& pi,
                                          double tol, std::size_t node_budget) {
    if (tol <= 0.0) throw std::invalid_argument("evaluate_history_policy: tol must be positive");
    const auto diag = validate(m);
    if (!diag.empty())
        throw std::invalid_argument("evaluate_history_policy: invalid model: " + diag.front());
    if (pi.n_obs != m.n_obs())
        throw std::invalid_argument("evaluate_history_policy: policy branching factor mismatch");

    const int nx = m.mdp.n_states(), ny = m.n_obs();
    const int H = truncation_horizon(m.mdp.cost_sup(), m.mdp.discount, tol);

    HistoryEvalResult res;
    res.horizon = H;
    res.tail_bound = m.mdp.cost_sup() * std::pow(m.mdp.discount, H + 1) / (1.0 - m.mdp.discount);

    struct Walker {
        const TabularPOMDP& m;
        const HistoryPolicy& pi;
        HistoryEvalResult& res;
        std::size_t budget;
        int horizon;

        // alpha(x) = P(x_t = x, y_{0:t} = hist); discount carried in beta_t.
        void walk(int t, const std::vector<double>& alpha, std::vector<int>& hist,
                  double beta_t) {
            if (++res.node_count > budget)
                throw std::runtime_error("evaluate_history_policy: node budget " +
                                         std::to_string(budget) + " exceeded");
            if (static_cast<int>(hist.size()) > pi.levels) res.used_default_action = true;
            const int u = pi.action_at(hist);
            const int nx = m.mdp.n_states(), ny = m.n_obs();
            double stage = 0.0;
            for (int x = 0; x < nx; ++x) stage += alpha[x] * m.mdp.cost[x][u];
            res.value += beta_t * stage;
            if (t >= horizon) return;

            std::vector<double> pred(nx, 0.0);
            for (int x = 0; x < nx; ++x) {
                if (alpha[x] == 0.0) continue;
                const auto& row = m.mdp.kernel[x][u];
                for (int y2 = 0; y2 < nx; ++y2) pred[y2] += alpha[x] * row[y2];
            }
            std::vector<double> alpha2(nx);
            for (int y = 0; y < ny; ++y) {
                double mass = 0.0;
                for (int x2 = 0; x2 < nx; ++x2) {
                    alpha2[x2] = pred[x2] * m.channel[x2][y];
                    mass += alpha2[x2];
                }
                if (mass <= 0.0) continue;
                hist.push_back(y);
                walk(t + 1, alpha2, hist, beta_t * m.mdp.discount);
                hist.pop_back();
            }
        }
    } walker{m, pi, res, node_budget, H};

    std::vector<int> hist;
    std::vector<double> alpha(nx);
    for (int y = 0; y < ny; ++y) {
        double mass = 0.0;
        for (int x = 0; x < nx; ++x) {
            alpha[x] = m.mdp.initial[x] * m.channel[x][y];
            mass += alpha[x];
        }
        if (mass <= 0.0) continue;
        hist.assign(1, y);
        walker.walk(0, alpha, hist, 1.0);
    }
    return res;
}

namespace {

double truncated_walk(const TabularPOMDP& m, const HistoryPolicy& pi, int t, int horizon,
                      const std::vector<double>& alpha, std::vector<int>& hist, double beta_t) {
    const int nx = m.mdp.n_states(), ny = m.n_obs();
    const int u = pi.action_at(hist);
    double total = 0.0;
    for (int x = 0; x < nx; ++x) total += alpha[x] * m.mdp.cost[x][u];
    total *= beta_t;
    if (t >= horizon) return total;

    std::vector<double> pred(nx, 0.0);
    for (int x = 0; x < nx; ++x) {
        if (alpha[x] == 0.0) continue;
        const auto& row = m.mdp.kernel[x][u];
        for (int y2 = 0; y2 < nx; ++y2) pred[y2] += alpha[x] * row[y2];
    }
    std::vector<double> alpha2(nx);
    for (int y = 0; y < ny; ++y) {
        double mass = 0.0;
        for (int x2 = 0; x2 < nx; ++x2) {
            alpha2[x2] = pred[x2] * m.channel[x2][y];
            mass += alpha2[x2];
        }
        if (mass <= 0.0) continue;
        hist.push_back(y);
        total += truncated_walk(m, pi, t + 1, horizon, alpha2, hist, beta_t * m.mdp.discount);
        hist.pop_back();
    }
    return total;
}

} // namespace

double history_policy_truncated_value(const TabularPOMDP& m, const HistoryPolicy& pi,
                                      int horizon) {
    const int nx = m.mdp.n_states(), ny = m.n_obs();
    double total = 0.0;
    std::vector<int> hist;
    std::vector<double> alpha(nx);
    for (int y = 0; y < ny; ++y) {
        double mass = 0.0;
        for (int x = 0; x < nx; ++x) {
            alpha[x] = m.mdp.initial[x] * m.channel[x][y];
            mass += alpha[x];
        }
        if (mass <= 0.0) continue;
        hist.assign(1, y);
        total += truncated_walk(m, pi, 0, horizon, alpha, hist, 1.0);
    }
    return total;
}

// ------------------------------------------------------------------------ JSON

std::string ValueIterationResult::to_json() const {
    return nlohmann::json{{"value", value},
                          {"policy", policy.action},
                          {"iterations", iterations},
                          {"certified_error", certified_error}}
        .dump();
}

std::string RegionEvalResult::to_json() const {
    return nlohmann::json{
        {"value", value}, {"horizon", horizon}, {"certified_error", tail_bound}}
        .dump();
}

std::string BeliefSolveResult::to_json() const {
    return nlohmann::json{{"value", value},
                          {"horizon", horizon},
                          {"node_count", node_count},
                          {"policy_levels", policy_levels},
                          {"certified_error", tail_bound}}
        .dump();
}

std::string HistoryEvalResult::to_json() const {
    return nlohmann::json{{"value", value},
                          {"horizon", horizon},
                          {"node_count", node_count},
                          {"used_default_action", used_default_action},
                          {"certified_error", tail_bound}}
        .dump();
}

} // namespace kmlab

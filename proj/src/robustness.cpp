#include "kmlab/robustness.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace kmlab {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double shared_beta(double a, double b, const char* who) {
    if (std::abs(a - b) > kStochasticTol)
        throw std::invalid_argument(std::string(who) + ": models have different discounts");
    return a;
}

double tv_coefficient(double cost_sup, double beta) {
    return cost_sup * beta / ((1.0 - beta) * (1.0 - beta));
}

} // namespace

std::string MismatchRecord::csv_header() {
    return "true_id,design_id,beta,sup_tv,sup_w1,j_opt_true,j_opt_design,j_cross,loss,"
           "continuity_bound,robustness_bound,bound_holds,tol,policy_provenance";
}

std::string MismatchRecord::csv_row() const {
    std::string s;
    s += true_id + "," + design_id + "," + fmt17(beta) + "," + fmt17(kernel_tv_sup) + "," +
         fmt17(kernel_w1_sup) + "," + fmt17(j_opt_true) + "," + fmt17(j_opt_design) + "," +
         fmt17(j_cross) + "," + fmt17(loss) + "," + fmt17(continuity_bound) + "," +
         fmt17(robustness_bound) + "," + (bound_holds ? "1" : "0") + "," + fmt17(tol) + "," +
         policy_provenance;
    return s;
}

std::string MismatchRecord::to_jsonl() const {
    nlohmann::json j{{"true_id", true_id},
                     {"design_id", design_id},
                     {"beta", beta},
                     {"sup_tv", kernel_tv_sup},
                     {"sup_w1", kernel_w1_sup},
                     {"j_opt_true", j_opt_true},
                     {"j_opt_design", j_opt_design},
                     {"j_cross", j_cross},
                     {"loss", loss},
                     {"continuity_bound", continuity_bound},
                     {"robustness_bound", robustness_bound},
                     {"bound_holds", bound_holds ? 1 : 0},
                     {"tol", tol},
                     {"policy_provenance", policy_provenance}};
    return j.dump();
}

double continuity_bound(const TabularMDP& a, const TabularMDP& b) {
    const double beta = shared_beta(a.discount, b.discount, "continuity_bound");
    return tv_coefficient(std::max(a.cost_sup(), b.cost_sup()), beta) * kernel_tv_sup(a, b);
}

double continuity_bound(const RegionModel& a, const RegionModel& b) {
    const double beta = shared_beta(a.discount, b.discount, "continuity_bound");
    return tv_coefficient(std::max(a.cost_sup(), b.cost_sup()), beta) * kernel_tv_sup(a, b);
}

double robustness_bound(const TabularMDP& a, const TabularMDP& b) {
    return 2.0 * continuity_bound(a, b);
}

double robustness_bound(const RegionModel& a, const RegionModel& b) {
    return 2.0 * continuity_bound(a, b);
}

MismatchRecord mismatch_loss(const TabularMDP& truth, const TabularMDP& design, double tol) {
    MismatchRecord r;
    r.true_id = "tabular_true";
    r.design_id = "tabular_design";
    r.beta = shared_beta(truth.discount, design.discount, "mismatch_loss");
    r.tol = tol;
    r.kernel_tv_sup = kernel_tv_sup(truth, design);
    r.kernel_w1_sup = kernel_w1_sup(truth, design);

    const auto vi_true = value_iterate(truth, tol);
    const auto vi_design = value_iterate(design, tol);
    r.j_opt_true = expected_value(truth.initial, evaluate_policy_exact(truth, vi_true.policy));
    r.j_opt_design =
        expected_value(design.initial, evaluate_policy_exact(design, vi_design.policy));
    r.j_cross = expected_value(truth.initial, evaluate_policy_exact(truth, vi_design.policy));
    r.loss = r.j_cross - r.j_opt_true;
    r.continuity_bound = continuity_bound(truth, design);
    r.robustness_bound = 2.0 * r.continuity_bound;
    r.bound_holds = r.loss <= r.robustness_bound + 4.0 * tol;
    r.policy_provenance = "value_iteration";
    return r;
}

MismatchRecord mismatch_loss(const GalleryEntry& entry, double tol) {
    MismatchRecord r;
    r.true_id = entry.model_true.name;
    r.design_id = entry.model_n.name;
    r.beta = shared_beta(entry.model_true.discount, entry.model_n.discount, "mismatch_loss");
    r.tol = tol;
    r.kernel_tv_sup = kernel_tv_sup(entry.model_true, entry.model_n);
    r.kernel_w1_sup = kernel_w1_sup(entry.model_true, entry.model_n);
    r.j_opt_true = evaluate_region_policy(entry.model_true, entry.true_policy, tol).value;
    r.j_opt_design = evaluate_region_policy(entry.model_n, entry.design_policy, tol).value;
    r.j_cross = evaluate_region_policy(entry.model_true, entry.design_policy, tol).value;
    r.loss = r.j_cross - r.j_opt_true;
    r.continuity_bound = continuity_bound(entry.model_true, entry.model_n);
    r.robustness_bound = 2.0 * r.continuity_bound;
    r.bound_holds = r.loss <= r.robustness_bound + 4.0 * tol;
    r.policy_provenance = "analytic";
    return r;
}

MismatchRecord mismatch_loss(const TabularPOMDP& truth, const TabularPOMDP& design,
                             const BeliefSolveOptions& opt) {
    MismatchRecord r;
    r.true_id = "pomdp_true";
    r.design_id = "pomdp_design";
    r.beta = shared_beta(truth.mdp.discount, design.mdp.discount, "mismatch_loss");
    r.tol = opt.tol;
    r.kernel_tv_sup = kernel_tv_sup(truth.mdp, design.mdp);
    r.kernel_w1_sup = kernel_w1_sup(truth.mdp, design.mdp);

    const auto sol_true = solve_pomdp_belief_tree(truth, opt);
    const auto sol_design = solve_pomdp_belief_tree(design, opt);
    r.j_opt_true = sol_true.value;
    r.j_opt_design = sol_design.value;
    r.j_cross = evaluate_history_policy(truth, sol_design.policy, opt.tol).value;
    r.loss = r.j_cross - r.j_opt_true;
    r.continuity_bound = continuity_bound(truth.mdp, design.mdp);
    r.robustness_bound = 2.0 * r.continuity_bound;
    r.bound_holds = r.loss <= r.robustness_bound + 4.0 * opt.tol;
    r.policy_provenance = "belief_tree";
    return r;
}

// ------------------------------------------------------- strategic measure TV

namespace {

void check_shared_pomdp_frame(const TabularPOMDP& p1, const TabularPOMDP& p2, const char* who) {
    if (p1.mdp.n_states() != p2.mdp.n_states() || p1.mdp.n_actions() != p2.mdp.n_actions() ||
        p1.n_obs() != p2.n_obs())
        throw std::invalid_argument(std::string(who) + ": shape mismatch");
    for (int x = 0; x < p1.mdp.n_states(); ++x) {
        if (std::abs(p1.mdp.initial[x] - p2.mdp.initial[x]) > kStochasticTol)
            throw std::invalid_argument(std::string(who) + ": priors differ");
        for (int y = 0; y < p1.n_obs(); ++y)
            if (std::abs(p1.channel[x][y] - p2.channel[x][y]) > kStochasticTol)
                throw std::invalid_argument(std::string(who) + ": channels differ");
    }
}

struct TvWalker {
    const TabularPOMDP& p1;
    const TabularPOMDP& p2;
    const HistoryPolicy& pi;
    int k;
    std::size_t budget;
    std::size_t visited = 0;
    double tv = 0.0;

    // prob1/prob2: probability of the trajectory prefix (x,y)_{0..t} under
    // the two kernels. Branches where both vanish are pruned.
    void walk(int t, int x, double prob1, double prob2, std::vector<int>& hist) {
        if (++visited > budget)
            throw std::runtime_error("strategic_tv: trajectory budget exceeded");
        if (t == k) {
            tv += std::abs(prob1 - prob2);
            return;
        }
        const int u = pi.action_at(hist);
        const int nx = p1.mdp.n_states(), ny = p1.n_obs();
        const auto& row1 = p1.mdp.kernel[x][u];
        const auto& row2 = p2.mdp.kernel[x][u];
        for (int x2 = 0; x2 < nx; ++x2) {
            const double q1 = prob1 * row1[x2], q2 = prob2 * row2[x2];
            if (q1 == 0.0 && q2 == 0.0) continue;
            for (int y2 = 0; y2 < ny; ++y2) {
                const double c = p1.channel[x2][y2];
                if (c == 0.0) continue;
                hist.push_back(y2);
                walk(t + 1, x2, q1 * c, q2 * c, hist);
                hist.pop_back();
            }
        }
    }
};

} // namespace

StrategicTvResult strategic_tv(const TabularPOMDP& p1, const TabularPOMDP& p2,
                               const HistoryPolicy& pi, int k, std::size_t trajectory_budget) {
    if (k < 0) throw std::invalid_argument("strategic_tv: negative horizon");
    check_shared_pomdp_frame(p1, p2, "strategic_tv");

    StrategicTvResult res;
    res.sup_tv = kernel_tv_sup(p1.mdp, p2.mdp);
    res.bound = k * res.sup_tv;

    TvWalker walker{p1, p2, pi, k, trajectory_budget};
    std::vector<int> hist;
    for (int x = 0; x < p1.mdp.n_states(); ++x) {
        if (p1.mdp.initial[x] == 0.0) continue;
        for (int y = 0; y < p1.n_obs(); ++y) {
            const double c = p1.channel[x][y];
            if (c == 0.0) continue;
            hist.assign(1, y);
            walker.walk(0, x, p1.mdp.initial[x] * c, p2.mdp.initial[x] * c, hist);
        }
    }
    res.exact_tv = walker.tv;
    res.holds = res.exact_tv <= res.bound + 1e-10;
    return res;
}

// ------------------------------------------------------------ sup over policies

SupGapResult policy_sup_gap(const TabularPOMDP& p1, const TabularPOMDP& p2, int horizon,
                            std::size_t policy_budget) {
    if (horizon < 0) throw std::invalid_argument("policy_sup_gap: negative horizon");
    check_shared_pomdp_frame(p1, p2, "policy_sup_gap");
    const int nu = p1.mdp.n_actions();
    const int ny = p1.n_obs();
    const std::size_t nodes = HistoryPolicy::tree_size(ny, horizon + 1);

    // Policy count nu^nodes, guarded against overflow.
    double log_count = static_cast<double>(nodes) * std::log(static_cast<double>(nu));
    if (log_count > std::log(static_cast<double>(policy_budget)) + 1e-9)
        throw std::invalid_argument("policy_sup_gap: policy count exceeds budget " +
                                    std::to_string(policy_budget));

    SupGapResult res;
    res.horizon = horizon;
    const double beta = shared_beta(p1.mdp.discount, p2.mdp.discount, "policy_sup_gap");
    const double csup = std::max(p1.mdp.cost_sup(), p2.mdp.cost_sup());
    res.tail_bound = csup * std::pow(beta, horizon + 1) / (1.0 - beta);

    HistoryPolicy pi;
    pi.n_obs = ny;
    pi.levels = horizon + 1;
    pi.actions.assign(nodes, 0);

    while (true) {
        ++res.policies;
        const double j1 = history_policy_truncated_value(p1, pi, horizon);
        const double j2 = history_policy_truncated_value(p2, pi, horizon);
        res.gap = std::max(res.gap, std::abs(j1 - j2));

        // Odometer over the action tree.
        std::size_t pos = 0;
        while (pos < nodes) {
            if (++pi.actions[pos] < nu) break;
            pi.actions[pos++] = 0;
        }
        if (pos == nodes) break;
    }
    return res;
}

// ------------------------------------------------------------- random corpora

namespace {

std::vector<double> random_row(int n, SplitMix64& rng) {
    std::vector<double> row(n);
    for (double& v : row) v = rng.next_double() + 1e-9;   // keep rows strictly positive
    normalize_probability_row(row);
    return row;
}

} // namespace

TabularMDP make_random_mdp(int nx, int nu, double beta, SplitMix64& rng) {
    TabularMDP m;
    m.discount = beta;
    m.state_labels.reserve(nx);
    for (int x = 0; x < nx; ++x) m.state_labels.push_back({static_cast<double>(x)});
    m.action_labels.reserve(nu);
    for (int u = 0; u < nu; ++u) m.action_labels.push_back(static_cast<double>(u));
    m.kernel.assign(nx, std::vector<std::vector<double>>(nu));
    m.cost.assign(nx, std::vector<double>(nu));
    for (int x = 0; x < nx; ++x)
        for (int u = 0; u < nu; ++u) {
            m.kernel[x][u] = random_row(nx, rng);
            m.cost[x][u] = rng.next_double();
        }
    m.initial = random_row(nx, rng);
    return m;
}

TabularMDP mix_kernel_toward_random(const TabularMDP& base, double eps, SplitMix64& rng) {
    TabularMDP m = base;
    for (int x = 0; x < m.n_states(); ++x)
        for (int u = 0; u < m.n_actions(); ++u) {
            const auto ref = random_row(m.n_states(), rng);
            auto& row = m.kernel[x][u];
            for (int y = 0; y < m.n_states(); ++y)
                row[y] = (1.0 - eps) * row[y] + eps * ref[y];
            normalize_probability_row(row);
        }
    return m;
}

TabularMDP mix_kernels(const TabularMDP& a, const TabularMDP& b, double eps) {
    if (a.n_states() != b.n_states() || a.n_actions() != b.n_actions())
        throw std::invalid_argument("mix_kernels: shape mismatch");
    TabularMDP m = a;
    for (int x = 0; x < m.n_states(); ++x)
        for (int u = 0; u < m.n_actions(); ++u) {
            auto& row = m.kernel[x][u];
            for (int y = 0; y < m.n_states(); ++y)
                row[y] = (1.0 - eps) * a.kernel[x][u][y] + eps * b.kernel[x][u][y];
            normalize_probability_row(row);
        }
    return m;
}

TabularPOMDP make_random_pomdp(int nx, int nu, int ny, double beta, SplitMix64& rng) {
    TabularPOMDP p;
    p.mdp = make_random_mdp(nx, nu, beta, rng);
    p.channel.reserve(nx);
    for (int x = 0; x < nx; ++x) p.channel.push_back(random_row(ny, rng));
    p.uninformative = false;
    return p;
}

TabularPOMDP mix_pomdp_kernel(const TabularPOMDP& base, double eps, SplitMix64& rng) {
    TabularPOMDP p = base;
    p.mdp = mix_kernel_toward_random(base.mdp, eps, rng);
    return p;
}

} // namespace kmlab

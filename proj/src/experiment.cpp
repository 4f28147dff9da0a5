#include "kmlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "kmlab/gallery.hpp"
#include "kmlab/learning.hpp"
#include "kmlab/robustness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace kmlab {

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
    throw std::invalid_argument("config." + field + ": " + what);
}

template <typename T>
T field_or(const json& j, const std::string& name, const T& def) {
    if (!j.contains(name)) return def;
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        config_error("params." + name, "has the wrong type");
    }
}

template <typename T>
T required_field(const json& j, const std::string& name) {
    if (!j.contains(name)) config_error("params." + name, "is required");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        config_error("params." + name, "has the wrong type");
    }
}

template <typename T>
std::vector<T> nonempty_grid(const json& j, const std::string& name) {
    auto v = required_field<std::vector<T>>(j, name);
    if (v.empty()) config_error("params." + name, "must be a nonempty array");
    return v;
}

// Ordered parallel map: results land at their task index regardless of the
// schedule, and all per-task randomness comes from substreams, so --jobs
// never changes any output byte.
template <typename Fn>
auto parallel_map(int n_tasks, int jobs, Fn fn) -> std::vector<decltype(fn(0))> {
    using R = decltype(fn(0));
    std::vector<R> out(n_tasks);
    if (jobs <= 1) {
        for (int i = 0; i < n_tasks; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int k = std::min(jobs, n_tasks);
    pool.reserve(k);
    for (int i = 0; i < k; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

struct ExperimentOutput {
    std::map<std::string, std::string> files;   // name -> content
    int violations = 0;
};

// ------------------------------------------------------------------ gallery

ExperimentOutput run_gallery(const json& params, std::uint64_t, double tol, int jobs) {
    auto entries = field_or<std::vector<std::string>>(params, "entries", gallery_names());
    if (entries.empty()) config_error("params.entries", "must be a nonempty array");
    const auto n_grid = nonempty_grid<int>(params, "n_grid");
    const auto beta_grid = nonempty_grid<double>(params, "beta_grid");
    for (int n : n_grid)
        if (n < 2) config_error("params.n_grid", "needs n >= 2");
    for (double b : beta_grid)
        if (!(b > 0.0 && b < 1.0)) config_error("params.beta_grid", "needs beta in (0,1)");

    struct Cell {
        std::string gallery_row;
        std::string record_csv;
        std::string record_jsonl;
        bool holds = true;
    };
    std::vector<std::tuple<std::string, int, double>> tasks;
    for (const auto& name : entries)
        for (int n : n_grid)
            for (double beta : beta_grid) tasks.emplace_back(name, n, beta);

    auto cells = parallel_map(static_cast<int>(tasks.size()), jobs, [&](int i) {
        const auto& [name, n_raw, beta] = tasks[i];
        // Setwise constructions need even n; round up rather than fail the grid.
        const bool setwise = name.rfind("setwise", 0) == 0;
        const int n = (setwise && n_raw % 2 != 0) ? n_raw + 1 : n_raw;
        const GalleryEntry e = make_gallery_entry(name, n, beta);
        const MismatchRecord rec = mismatch_loss(e, tol);

        auto form = [&](const std::map<std::string, GalleryEntry::Form>& m,
                        const char* key) -> std::string {
            const auto it = m.find(key);
            return it == m.end() ? std::string() : fmt17(it->second(beta, n));
        };
        std::string gap;
        if (setwise)
            gap = fmt17(setwise_gap(square_wave_density(n), Measure1D::uniform(0.0, 1.0),
                                    dyadic_prefix_family(n)));

        Cell c;
        c.gallery_row = name + "," + std::to_string(n) + "," + fmt17(beta) + "," +
                        fmt17(rec.j_opt_design) + "," + form(e.closed_form_exact, "j_opt_n") +
                        "," + form(e.closed_form_paper, "j_opt_n") + "," + fmt17(rec.j_opt_true) +
                        "," + form(e.closed_form_exact, "j_opt_true") + "," +
                        form(e.closed_form_paper, "j_opt_true") + "," + fmt17(rec.j_cross) + "," +
                        form(e.closed_form_exact, "j_cross") + "," + fmt17(rec.loss) + "," +
                        form(e.closed_form_exact, "loss") + "," + fmt17(rec.kernel_tv_sup) + "," +
                        fmt17(rec.kernel_w1_sup) + "," + gap;
        c.record_csv = rec.csv_row();
        c.record_jsonl = rec.to_jsonl();
        c.holds = rec.bound_holds;
        return c;
    });

    ExperimentOutput out;
    std::string gallery_csv =
        "entry,n,beta,j_opt_n,j_opt_n_exact,j_opt_n_paper,j_opt_true,j_opt_true_exact,"
        "j_opt_true_paper,j_cross,j_cross_exact,loss,loss_exact,sup_tv,sup_w1,"
        "setwise_gap_dyadic\n";
    std::string records_csv = MismatchRecord::csv_header() + "\n";
    std::string records_jsonl;
    for (const auto& c : cells) {
        gallery_csv += c.gallery_row + "\n";
        records_csv += c.record_csv + "\n";
        records_jsonl += c.record_jsonl + "\n";
        if (!c.holds) ++out.violations;
    }
    out.files["gallery.csv"] = gallery_csv;
    out.files["records.csv"] = records_csv;
    out.files["records.jsonl"] = records_jsonl;
    return out;
}

// ------------------------------------------------------------------- bounds

ExperimentOutput run_bounds(const json& params, std::uint64_t master_seed, double tol, int jobs) {
    const int pairs = required_field<int>(params, "pairs");
    if (pairs < 1) config_error("params.pairs", "must be positive");
    const auto eps_grid = nonempty_grid<double>(params, "eps_grid");
    const auto beta_grid = nonempty_grid<double>(params, "beta_grid");
    const int max_states = field_or<int>(params, "max_states", 6);
    const int max_actions = field_or<int>(params, "max_actions", 4);
    if (max_states < 2 || max_actions < 2)
        config_error("params.max_states/max_actions", "must be at least 2");

    struct Cell {
        MismatchRecord rec;
        bool continuity_ok = true;
    };
    auto cells = parallel_map(pairs, jobs, [&](int i) {
        SplitMix64 rng(substream_seed(master_seed, static_cast<std::uint64_t>(i)));
        const double eps = eps_grid[i % eps_grid.size()];
        const double beta = beta_grid[(i / eps_grid.size()) % beta_grid.size()];
        const int nx = 2 + static_cast<int>(rng.next_below(max_states - 1));
        const int nu = 2 + static_cast<int>(rng.next_below(max_actions - 1));
        const TabularMDP truth = make_random_mdp(nx, nu, beta, rng);
        const TabularMDP design = mix_kernel_toward_random(truth, eps, rng);
        Cell c;
        c.rec = mismatch_loss(truth, design, tol);
        c.rec.true_id = "pair" + std::to_string(i) + "_true";
        c.rec.design_id = "pair" + std::to_string(i) + "_design";
        c.continuity_ok =
            std::abs(c.rec.j_opt_true - c.rec.j_opt_design) <= c.rec.continuity_bound + 4.0 * tol;
        return c;
    });

    ExperimentOutput out;
    std::string csv = MismatchRecord::csv_header() + "\n";
    std::string jsonl;
    for (const auto& c : cells) {
        csv += c.rec.csv_row() + "\n";
        jsonl += c.rec.to_jsonl() + "\n";
        if (!c.rec.bound_holds || !c.continuity_ok) ++out.violations;
    }
    out.files["records.csv"] = csv;
    out.files["records.jsonl"] = jsonl;
    return out;
}

// ---------------------------------------------------------------- strategic

ExperimentOutput run_strategic(const json& params, std::uint64_t master_seed, double, int jobs) {
    const int pairs = required_field<int>(params, "pairs");
    if (pairs < 1) config_error("params.pairs", "must be positive");
    const auto horizons = nonempty_grid<int>(params, "horizons");
    const int states = field_or<int>(params, "states", 3);
    const int actions = field_or<int>(params, "actions", 2);
    const int obs = field_or<int>(params, "obs", 2);
    const double eps = field_or<double>(params, "eps", 0.1);
    const double beta = field_or<double>(params, "beta", 0.5);
    const int policy_levels = field_or<int>(params, "policy_levels",
                                            *std::max_element(horizons.begin(), horizons.end()));

    struct Cell {
        std::string rows;
        int violations = 0;
    };
    auto cells = parallel_map(pairs, jobs, [&](int i) {
        SplitMix64 rng(substream_seed(master_seed, static_cast<std::uint64_t>(i)));
        const TabularPOMDP p1 = make_random_pomdp(states, actions, obs, beta, rng);
        const TabularPOMDP p2 = mix_pomdp_kernel(p1, eps, rng);
        const HistoryPolicy pi = HistoryPolicy::random(obs, policy_levels, actions, rng);
        Cell c;
        double prev = -1.0;
        for (int k : horizons) {
            const StrategicTvResult r = strategic_tv(p1, p2, pi, k);
            c.rows += std::to_string(i) + "," + std::to_string(k) + "," + fmt17(r.exact_tv) +
                      "," + fmt17(r.sup_tv) + "," + fmt17(r.bound) + "," + (r.holds ? "1" : "0") +
                      "\n";
            if (!r.holds || r.exact_tv < prev - 1e-12) ++c.violations;
            prev = r.exact_tv;
        }
        return c;
    });

    ExperimentOutput out;
    std::string csv = "pair,k,exact_tv,sup_tv,bound,holds\n";
    for (const auto& c : cells) {
        csv += c.rows;
        out.violations += c.violations;
    }
    out.files["strategic.csv"] = csv;
    return out;
}

// ------------------------------------------------------------------- supgap

ExperimentOutput run_supgap(const json& params, std::uint64_t master_seed, double tol, int jobs) {
    const int pairs = field_or<int>(params, "pairs", 3);
    const int horizon = field_or<int>(params, "horizon", 2);
    const auto eps_grid = nonempty_grid<double>(params, "eps_grid");
    const int states = field_or<int>(params, "states", 3);
    const int actions = field_or<int>(params, "actions", 2);
    const int obs = field_or<int>(params, "obs", 2);
    const double beta = field_or<double>(params, "beta", 0.5);
    const std::size_t budget = field_or<std::size_t>(params, "policy_budget", 100'000);

    struct Cell {
        std::string rows;
        int violations = 0;
    };
    auto cells = parallel_map(pairs, jobs, [&](int i) {
        SplitMix64 rng(substream_seed(master_seed, static_cast<std::uint64_t>(i)));
        const TabularPOMDP p1 = make_random_pomdp(states, actions, obs, beta, rng);
        // Fixed mixing target: the eps grid walks one ray toward it.
        const TabularMDP target = make_random_mdp(states, actions, beta, rng);
        BeliefSolveOptions bopt;
        bopt.tol = tol;
        const double j1 = solve_pomdp_belief_tree(p1, bopt).value;

        Cell c;
        double prev_gap = std::numeric_limits<double>::infinity();
        for (double eps : eps_grid) {
            TabularPOMDP p2 = p1;
            p2.mdp = mix_kernels(p1.mdp, target, eps);
            const SupGapResult g = policy_sup_gap(p1, p2, horizon, budget);
            const double j2 = solve_pomdp_belief_tree(p2, bopt).value;
            c.rows += std::to_string(i) + "," + fmt17(eps) + "," + std::to_string(g.horizon) +
                      "," + fmt17(g.gap) + "," + fmt17(g.tail_bound) + "," + fmt17(j1) + "," +
                      fmt17(j2) + "," + std::to_string(g.policies) + "\n";
            // The enumerated sup dominates the optimal-value gap up to tails
            // and solver error; the gap should shrink as eps does.
            if (g.gap < std::abs(j1 - j2) - 2.0 * g.tail_bound - 2.0 * tol) ++c.violations;
            if (g.gap > prev_gap + 1e-12) ++c.violations;
            prev_gap = g.gap;
        }
        return c;
    });

    ExperimentOutput out;
    std::string csv = "pair,eps,horizon,gap,tail_bound,j_star_1,j_star_2,policies\n";
    for (const auto& c : cells) {
        csv += c.rows;
        out.violations += c.violations;
    }
    out.files["supgap.csv"] = csv;
    return out;
}

// -------------------------------------------------------------------- learn

ExperimentOutput run_learn(const json& params, std::uint64_t master_seed, double tol, int) {
    const int states = field_or<int>(params, "states", 5);
    const int actions = field_or<int>(params, "actions", 3);
    const double beta = field_or<double>(params, "beta", 0.5);
    const auto sizes = nonempty_grid<long>(params, "sample_sizes");
    const int seeds = field_or<int>(params, "seeds", 20);
    const std::string estimator = field_or<std::string>(params, "estimator", "count");

    SplitMix64 rng(substream_seed(master_seed, 0));
    const TabularMDP truth = make_random_mdp(states, actions, beta, rng);
    const LearningCurve curve =
        learning_curve(truth, estimator, sizes, seeds, substream_seed(master_seed, 1), tol);

    ExperimentOutput out;
    out.files["curve.csv"] = LearningCurve::csv_header() + "\n" + curve.csv_rows();
    for (const auto& p : curve.points)
        if (!p.record.bound_holds) ++out.violations;
    const auto medians = curve.median_losses();
    for (std::size_t i = 1; i < medians.size(); ++i)
        if (medians[i] > medians[i - 1] + 1e-12) ++out.violations;
    return out;
}

} // namespace

// ------------------------------------------------------------- config plumbing

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    if (!j.contains("version")) config_error("version", "is required");
    c.version = j.at("version").get<int>();
    if (c.version != 1) config_error("version", "unsupported (expected 1)");
    if (!j.contains("kind")) config_error("kind", "is required");
    c.kind = j.at("kind").get<std::string>();
    static const std::vector<std::string> kinds{"gallery", "bounds", "strategic", "supgap",
                                                "learn"};
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
        config_error("kind", "unknown experiment kind '" + c.kind + "'");
    if (!j.contains("master_seed"))
        config_error("master_seed", "is required (wall-clock seeding is not supported)");
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.tol = field_or<double>(j, "tol", 1e-9);
    if (!(c.tol > 0.0)) config_error("tol", "must be positive");
    c.params_json = j.value("params", json::object()).dump();
    return c;
}

std::string ExperimentConfig::serialize() const {
    json j{{"version", version},
           {"kind", kind},
           {"master_seed", master_seed},
           {"tol", tol},
           {"params", json::parse(params_json)}};
    return j.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string s = config.serialize();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    fs::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_experiment(const ExperimentConfig& config, const RunOptions& opt) {
    ExperimentConfig effective = config;
    if (opt.seed_override) effective.master_seed = *opt.seed_override;
    const json params = json::parse(effective.params_json);

    ExperimentOutput out;
    if (effective.kind == "gallery")
        out = run_gallery(params, effective.master_seed, effective.tol, opt.jobs);
    else if (effective.kind == "bounds")
        out = run_bounds(params, effective.master_seed, effective.tol, opt.jobs);
    else if (effective.kind == "strategic")
        out = run_strategic(params, effective.master_seed, effective.tol, opt.jobs);
    else if (effective.kind == "supgap")
        out = run_supgap(params, effective.master_seed, effective.tol, opt.jobs);
    else if (effective.kind == "learn")
        out = run_learn(params, effective.master_seed, effective.tol, opt.jobs);
    else
        config_error("kind", "unknown experiment kind '" + effective.kind + "'");

    fs::create_directories(opt.out_dir);
    json outputs = json::array();
    for (const auto& [name, _] : out.files) outputs.push_back(name);
    json manifest{{"tool", "kmlab"},
                  {"tool_version", kToolVersion},
                  {"config", json::parse(effective.serialize())},
                  {"config_hash", config_hash(effective)},
                  {"master_seed", effective.master_seed},
                  {"bound_violations", out.violations},
                  {"outputs", outputs}};
    for (const auto& [name, content] : out.files)
        write_file_atomic((fs::path(opt.out_dir) / name).string(), content);
    write_file_atomic((fs::path(opt.out_dir) / "manifest.json").string(),
                      manifest.dump(2) + "\n");

    return (opt.check && out.violations > 0) ? 2 : 0;
}

// ------------------------------------------------------------------- plotdata

namespace {

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace

std::vector<std::string> plotdata(const std::string& result_dir, const std::string& out_dir) {
    std::vector<std::string> written;
    fs::create_directories(out_dir);

    const fs::path gpath = fs::path(result_dir) / "gallery.csv";
    if (fs::exists(gpath)) {
        const auto rows = read_csv(gpath.string());
        if (rows.size() <= 1)
            std::cerr << "plotdata: warning: " << gpath.string() << " has no data rows\n";
        // Group by entry; emit n vs machine/exact/paper values plus the
        // n -> infinity asymptote of the exact form.
        std::map<std::string, std::string> series;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 16)
                throw std::runtime_error("plotdata: gallery.csv is missing columns");
            const std::string& entry = r[0];
            const double beta = std::stod(r[2]);
            const double asymptote = gallery_form_exact(entry, "j_opt_n", beta, 1'000'000'000);
            series[entry] += r[1] + "," + r[2] + "," + r[3] + "," + r[4] + "," + r[5] + "," +
                             fmt17(asymptote) + "\n";
        }
        for (const auto& [entry, body] : series) {
            const std::string name = "series_gallery_" + entry + ".csv";
            write_file_atomic((fs::path(out_dir) / name).string(),
                              "n,beta,j_opt_n,j_opt_n_exact,j_opt_n_paper,asymptote\n" + body);
            written.push_back(name);
        }
        if (series.empty()) {
            const std::string name = "series_gallery.csv";
            write_file_atomic((fs::path(out_dir) / name).string(),
                              "n,beta,j_opt_n,j_opt_n_exact,j_opt_n_paper,asymptote\n");
            written.push_back(name);
        }
    }

    const fs::path cpath = fs::path(result_dir) / "curve.csv";
    if (fs::exists(cpath)) {
        const auto rows = read_csv(cpath.string());
        if (rows.size() <= 1)
            std::cerr << "plotdata: warning: " << cpath.string() << " has no data rows\n";
        std::map<long, std::vector<double>> losses;   // N -> losses
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 11)
                throw std::runtime_error("plotdata: curve.csv is missing columns");
            losses[std::stol(r[0])].push_back(std::stod(r[7]));
        }
        std::string body;
        double prev_median = std::numeric_limits<double>::infinity();
        for (auto& [n, v] : losses) {
            std::sort(v.begin(), v.end());
            const double median = quantile_sorted(v, 0.5);
            body += std::to_string(n) + "," + fmt17(median) + "," + fmt17(quantile_sorted(v, 0.25)) +
                    "," + fmt17(quantile_sorted(v, 0.75)) + "," +
                    (median <= prev_median + 1e-12 ? "1" : "0") + "\n";
            prev_median = median;
        }
        const std::string name = "series_learning.csv";
        write_file_atomic((fs::path(out_dir) / name).string(),
                          "N,median_loss,q1_loss,q3_loss,median_nonincreasing\n" + body);
        written.push_back(name);
    }

    const fs::path spath = fs::path(result_dir) / "strategic.csv";
    if (fs::exists(spath)) {
        const auto rows = read_csv(spath.string());
        if (rows.size() <= 1)
            std::cerr << "plotdata: warning: " << spath.string() << " has no data rows\n";
        std::map<int, std::pair<double, double>> by_k;   // k -> (max exact, max bound)
        std::map<int, bool> all_hold;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 6)
                throw std::runtime_error("plotdata: strategic.csv is missing columns");
            const int k = std::stoi(r[1]);
            auto& [me, mb] = by_k[k];
            me = std::max(me, std::stod(r[2]));
            mb = std::max(mb, std::stod(r[4]));
            if (!all_hold.count(k)) all_hold[k] = true;
            all_hold[k] = all_hold[k] && r[5] == "1";
        }
        std::string body;
        for (const auto& [k, mm] : by_k)
            body += std::to_string(k) + "," + fmt17(mm.first) + "," + fmt17(mm.second) + "," +
                    (all_hold[k] ? "1" : "0") + "\n";
        const std::string name = "series_strategic.csv";
        write_file_atomic((fs::path(out_dir) / name).string(),
                          "k,max_exact_tv,max_bound,holds_all\n" + body);
        written.push_back(name);
    }

    const fs::path qpath = fs::path(result_dir) / "supgap.csv";
    if (fs::exists(qpath)) {
        const auto rows = read_csv(qpath.string());
        if (rows.size() <= 1)
            std::cerr << "plotdata: warning: " << qpath.string() << " has no data rows\n";
        std::map<double, std::pair<double, double>> by_eps;   // eps -> (min gap, max gap)
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 8)
                throw std::runtime_error("plotdata: supgap.csv is missing columns");
            const double eps = std::stod(r[1]);
            const double gap = std::stod(r[3]);
            auto it = by_eps.find(eps);
            if (it == by_eps.end())
                by_eps[eps] = {gap, gap};
            else {
                it->second.first = std::min(it->second.first, gap);
                it->second.second = std::max(it->second.second, gap);
            }
        }
        std::string body;
        for (const auto& [eps, mm] : by_eps)
            body += fmt17(eps) + "," + fmt17(mm.first) + "," + fmt17(mm.second) + "\n";
        const std::string name = "series_supgap.csv";
        write_file_atomic((fs::path(out_dir) / name).string(), "eps,min_gap,max_gap\n" + body);
        written.push_back(name);
    }

    if (written.empty())
        std::cerr << "plotdata: warning: no recognized result files in " << result_dir << "\n";
    return written;
}

} // namespace kmlab

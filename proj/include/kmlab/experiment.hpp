#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kmlab {

/// Parsed experiment configuration. Configs are versioned JSON documents with
/// a mandatory master seed (wall-clock seeding is not supported anywhere).
struct ExperimentConfig {
    int version = 1;
    std::string kind;            // gallery | bounds | strategic | supgap | learn
    std::uint64_t master_seed = 0;
    double tol = 1e-9;
    std::string params_json;     // kind-specific parameters, canonical form

    static ExperimentConfig parse(const std::string& text);   // throws naming the bad field
    std::string serialize() const;                             // canonical round-trip form
};

struct RunOptions {
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;
    bool check = false;   // exit code 2 on any bound violation
};

/// Execute a config and write result files plus a manifest atomically into
/// out_dir. Returns the process exit code contract: 0 success, 2 bound
/// violation in check mode. Errors throw.
int run_experiment(const ExperimentConfig& config, const RunOptions& opt);

/// Derive plot-ready series files from the result files in result_dir,
/// writing series_*.csv next to them into out_dir. Returns the list of files
/// written; warns (stderr) on empty inputs.
std::vector<std::string> plotdata(const std::string& result_dir, const std::string& out_dir);

/// FNV-1a hash of the canonical config serialization, hex-encoded.
std::string config_hash(const ExperimentConfig& config);

/// Atomic file write (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace kmlab

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "kmlab/experiment.hpp"
#include "kmlab/gallery.hpp"
#include "kmlab/models.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
    bool check = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "experiment config file (JSON)");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--seed", f.seed, "master seed override")->each([&](const std::string&) {
        f.seed_set = true;
    });
    cmd->add_option("--jobs", f.jobs, "parallel worker count")->check(CLI::PositiveNumber);
    cmd->add_flag("--check", f.check, "exit with status 2 on any bound violation");
}

int run_kind(const std::string& kind, const CommonFlags& f) {
    if (f.config_path.empty()) {
        std::cerr << "error: --config is required\n";
        return 1;
    }
    kmlab::ExperimentConfig config =
        kmlab::ExperimentConfig::parse(kmlab::read_file(f.config_path));
    if (config.kind != kind) {
        std::cerr << "error: config kind '" << config.kind << "' does not match subcommand '"
                  << kind << "'\n";
        return 1;
    }
    kmlab::RunOptions opt;
    opt.out_dir = f.out_dir;
    if (f.seed_set) opt.seed_override = f.seed;
    opt.jobs = f.jobs;
    opt.check = f.check;
    const int code = kmlab::run_experiment(config, opt);
    std::cout << kind << ": results written to " << f.out_dir << "\n";
    if (code == 2) std::cout << kind << ": bound violations detected\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kmlab: model-mismatch robustness laboratory for discounted-cost control"};
    app.require_subcommand(1);

    // gallery: run the experiment, or list/dump the counterexample models.
    auto* gallery = app.add_subcommand("gallery", "counterexample gallery");
    CommonFlags gallery_flags;
    add_common(gallery, gallery_flags);
    auto* gallery_list = gallery->add_subcommand("list", "list gallery entries");
    auto* gallery_dump =
        gallery->add_subcommand("dump", "emit a gallery entry's model files as JSON");
    std::string dump_name;
    int dump_n = 4;
    double dump_beta = 0.5;
    bool dump_true_model = false;
    gallery_dump->add_option("name", dump_name, "entry name")->required();
    gallery_dump->add_option("--n", dump_n, "sequence index n")->check(CLI::PositiveNumber);
    gallery_dump->add_option("--beta", dump_beta, "discount factor");
    gallery_dump->add_flag("--true-model", dump_true_model,
                           "dump the limit model instead of the approximating one");

    CommonFlags bounds_flags, strategic_flags, supgap_flags, learn_flags;
    add_common(app.add_subcommand("bounds", "random-corpus bound checks"), bounds_flags);
    add_common(app.add_subcommand("strategic", "strategic-measure TV inequality"),
               strategic_flags);
    add_common(app.add_subcommand("supgap", "sup-over-policies gap enumeration"), supgap_flags);
    add_common(app.add_subcommand("learn", "data-driven learning curve"), learn_flags);

    auto* plot = app.add_subcommand("plotdata", "derive plot-ready series from result files");
    std::string plot_in, plot_out;
    plot->add_option("result_dir", plot_in, "directory holding result files")->required();
    plot->add_option("--out", plot_out, "output directory (default: result dir)");

    auto* validate_cmd = app.add_subcommand("validate", "validate a model file");
    std::string model_path;
    validate_cmd->add_option("model", model_path, "model JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gallery->parsed()) {
            if (gallery_list->parsed()) {
                for (const auto& name : kmlab::gallery_names()) std::cout << name << "\n";
                return 0;
            }
            if (gallery_dump->parsed()) {
                const auto entry = kmlab::make_gallery_entry(dump_name, dump_n, dump_beta);
                std::cout << kmlab::to_json(dump_true_model ? entry.model_true : entry.model_n);
                return 0;
            }
            return run_kind("gallery", gallery_flags);
        }
        if (app.got_subcommand("bounds")) return run_kind("bounds", bounds_flags);
        if (app.got_subcommand("strategic")) return run_kind("strategic", strategic_flags);
        if (app.got_subcommand("supgap")) return run_kind("supgap", supgap_flags);
        if (app.got_subcommand("learn")) return run_kind("learn", learn_flags);
        if (plot->parsed()) {
            const auto files = kmlab::plotdata(plot_in, plot_out.empty() ? plot_in : plot_out);
            for (const auto& f : files) std::cout << f << "\n";
            return 0;
        }
        if (validate_cmd->parsed()) {
            const auto diagnostics = kmlab::validate_model_json(kmlab::read_file(model_path));
            for (const auto& d : diagnostics) std::cout << d << "\n";
            if (diagnostics.empty()) {
                std::cout << "valid\n";
                return 0;
            }
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "fgml/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

// Command-line front end: mech-check, tabulate, train, compare, tune,
// subset-study. One declarative JSON config drives the pipeline; a few flags
// and the FGML_OUTPUT_DIR / FGML_WORKERS environment variables override it.

using fgml::pipeline::RunConfig;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string mechanism;
    std::string output_dir;
    std::vector<double> chis;
    int workers = -1;
    int grid_points = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "JSON configuration file");
        cmd->add_option("-m,--mechanism", mechanism, "mechanism file (overrides config)");
        cmd->add_option("-o,--out", output_dir, "output directory (overrides config)");
        cmd->add_option("--chi", chis, "chi_st values (overrides config)");
        cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
        cmd->add_option("--grid-points", grid_points, "grid size (overrides config)");
    }

    RunConfig build() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_json_file(config_path);
        if (!mechanism.empty()) cfg.mechanism_path = mechanism;
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (!chis.empty()) cfg.chis = chis;
        if (workers >= 0) cfg.workers = workers;
        if (grid_points > 0) cfg.grid_points = grid_points;
        cfg.apply_env_overrides();
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"laminar FGM library generation and surrogate regression"};
    app.require_subcommand(1);

    // mech-check
    auto* check = app.add_subcommand("mech-check", "parse and validate a mechanism file");
    std::string check_path;
    check->add_option("path", check_path, "mechanism file")->required();

    // tabulate
    CommonFlags tab_flags;
    auto* tab = app.add_subcommand("tabulate", "solve the chi sweep and export the library + CSV");
    tab_flags.attach(tab);

    // train
    CommonFlags train_flags;
    std::string train_family;
    auto* train = app.add_subcommand("train", "train one regressor and report its metrics");
    train_flags.attach(train);
    train->add_option("--family", train_family, "lr | mlp | rf | svr");

    // compare
    CommonFlags cmp_flags;
    double cmp_chi = 0.0;
    auto* cmp = app.add_subcommand("compare", "train all four families and emit comparison data");
    cmp_flags.attach(cmp);
    cmp->add_option("--curve-chi", cmp_chi, "chi for the prediction curves");

    // tune
    CommonFlags tune_flags;
    long long tune_samples = -1;
    long long tune_seed = -1;
    long long tune_k = -1;
    bool tune_full = false, tune_confirm = false;
    auto* tune = app.add_subcommand("tune", "hyperparameter search with a resumable journal");
    tune_flags.attach(tune);
    tune->add_option("--samples", tune_samples, "random-sample budget");
    tune->add_option("--seed", tune_seed, "sampling seed");
    tune->add_option("--top-k", tune_k, "rows in the report");
    tune->add_flag("--full", tune_full, "enumerate the full 702,900-point grid");
    tune->add_flag("--confirm-full", tune_confirm, "confirm the full-grid cost");

    // subset-study
    CommonFlags sub_flags;
    std::vector<int> sub_counts;
    auto* sub = app.add_subcommand("subset-study", "minimum-library error study");
    sub_flags.attach(sub);
    sub->add_option("--counts", sub_counts, "library counts to evaluate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return fgml::pipeline::cmd_mech_check(check_path, std::cout);
        if (tab->parsed()) return fgml::pipeline::cmd_tabulate(tab_flags.build(), std::cout);
        if (train->parsed()) {
            RunConfig cfg = train_flags.build();
            if (!train_family.empty()) cfg.family = train_family;
            return fgml::pipeline::cmd_train(cfg, std::cout);
        }
        if (cmp->parsed()) {
            RunConfig cfg = cmp_flags.build();
            if (cmp_chi > 0.0) cfg.compare_chi = cmp_chi;
            return fgml::pipeline::cmd_compare(cfg, std::cout);
        }
        if (tune->parsed()) {
            RunConfig cfg = tune_flags.build();
            if (tune_samples >= 0) cfg.tune_samples = static_cast<std::size_t>(tune_samples);
            if (tune_seed >= 0) cfg.tune_seed = static_cast<std::uint64_t>(tune_seed);
            if (tune_k >= 0) cfg.top_k = static_cast<std::size_t>(tune_k);
            if (tune_full) cfg.tune_full = true;
            if (tune_confirm) cfg.tune_confirm_full = true;
            return fgml::pipeline::cmd_tune(cfg, std::cout);
        }
        if (sub->parsed()) {
            RunConfig cfg = sub_flags.build();
            if (!sub_counts.empty()) cfg.subset_counts = sub_counts;
            return fgml::pipeline::cmd_subset_study(cfg, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fgml::pipeline::kExitInput;
    }
    return fgml::pipeline::kExitInput;
}

#ifndef FGML_PIPELINE_HPP
#define FGML_PIPELINE_HPP

#include "fgml/fgm_library.hpp"
#include "fgml/ml.hpp"
#include "fgml/tuner.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fgml::pipeline {

// CLI exit codes: 0 success, 1 input/validation error, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One declarative configuration drives every command; flags and the two
// environment overrides (FGML_OUTPUT_DIR, FGML_WORKERS) are layered on top.
// See docs/config.md.
struct RunConfig {
    std::string mechanism_path = "data/methane4step.mech";
    std::string output_dir = "out";
    int workers = 0; // 0: hardware concurrency

    // boundary conditions
    double t_ox = 300.0;
    double t_fuel = 300.15;
    double pressure = 101325.0;
    std::map<std::string, double> y_ox = {{"O2", 0.233}, {"N2", 0.767}};
    std::map<std::string, double> y_fuel = {{"CH4", 1.0}};

    // grid
    int grid_points = 30;
    std::string clustering = "tanh"; // or "uniform"
    double beta = 4.0;

    flamelet::SolveOptions solve;
    std::string chi_shape = "analytic-erfc"; // or "constant"
    std::vector<double> chis = {0.01, 5.5, 10.0, 14.5, 20.5, 25.0, 29.5};

    // training
    std::string family = "mlp";
    ml::MLPConfig mlp = make_default_mlp();
    ml::LRConfig lr;
    ml::RFConfig rf;
    ml::SVRConfig svr;
    double test_fraction = 0.2;
    std::uint64_t split_seed = 17;

    double compare_chi = 5.0;

    // tuning
    std::size_t tune_samples = 200;
    std::uint64_t tune_seed = 7;
    std::size_t top_k = 5;
    bool tune_full = false;
    bool tune_confirm_full = false;
    int tune_max_iter = 500;
    int tune_batch_size = 32;
    std::uint64_t tune_train_seed = 1;

    // subset study
    std::vector<double> pool_chis; // empty: 27 log-spaced in [0.01, 29.5]
    std::vector<int> subset_counts = {3, 7, 12, 17, 22};
    std::vector<double> subset_eval_chis; // empty: midpoints of the selection

    static ml::MLPConfig make_default_mlp();
    static RunConfig from_json_file(const std::string& path);
    void apply_env_overrides();
    void validate() const;
};

// log-spaced chi pool used when the config leaves pool_chis empty
std::vector<double> default_pool_chis();

// Shared building blocks
mech::Mechanism load_mechanism(const std::string& path);
flamelet::BoundaryConditions boundary_conditions(const RunConfig& cfg,
                                                 const mech::Mechanism& m);
flamelet::Grid make_grid(const RunConfig& cfg, const mech::Mechanism& m);
fgm::FlameletLibrary build_library(const RunConfig& cfg, const mech::Mechanism& m);

// Loads output_dir/dataset.csv when present, otherwise tabulates first.
fgm::Dataset load_or_build_dataset(const RunConfig& cfg, std::ostream& log);

// Commands; each returns an exit code and writes artifacts under output_dir.
int cmd_mech_check(const std::string& path, std::ostream& log);
int cmd_tabulate(const RunConfig& cfg, std::ostream& log);
int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_compare(const RunConfig& cfg, std::ostream& log);
int cmd_tune(const RunConfig& cfg, std::ostream& log);
int cmd_subset_study(const RunConfig& cfg, std::ostream& log);

} // namespace fgml::pipeline

#endif

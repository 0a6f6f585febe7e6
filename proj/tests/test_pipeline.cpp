#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fgml/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fgml;
using namespace fgml::pipeline;
namespace fs = std::filesystem;

namespace {

const std::string kMechPath = std::string(FGML_DATA_DIR) + "/methane4step.mech";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "fgml_pipeline" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// small fast configuration used by the command tests
RunConfig quick_config(const fs::path& out) {
    RunConfig cfg;
    cfg.mechanism_path = kMechPath;
    cfg.output_dir = out.string();
    cfg.chis = {0.01, 5.0, 20.0};
    cfg.grid_points = 16;
    cfg.family = "lr";
    cfg.lr.epochs = 30;
    cfg.mlp.hidden_layers = {6};
    cfg.mlp.max_iter = 30;
    cfg.rf.n_trees = 10;
    cfg.svr.max_passes = 50000;
    cfg.tune_samples = 3;
    cfg.tune_max_iter = 10;
    cfg.subset_counts = {3, 5};
    cfg.pool_chis = {0.05, 0.5, 2.0, 8.0, 20.0};
    cfg.workers = 2;
    return cfg;
}

} // namespace

TEST_CASE("config file parsing and validation") {
    fs::path dir = fresh_dir("config");
    fs::path cfg_path = dir / "run.json";
    {
        std::ofstream out(cfg_path);
        out << R"({
  "mechanism": ")" << kMechPath << R"(",
  "output_dir": ")" << (dir / "out").string() << R"(",
  "grid": {"points": 24, "clustering": "tanh", "beta": 5.0},
  "chi": {"values": [0.5, 7.5]},
  "train": {"family": "mlp", "mlp": {"hidden_layers": [15, 15], "activation": "tanh", "solver": "adam", "alpha": 0.001, "tol": 1e-05}},
  "tune": {"samples": 4, "seed": 99}
})";
    }
    auto cfg = RunConfig::from_json_file(cfg_path.string());
    CHECK(cfg.grid_points == 24);
    CHECK(cfg.beta == 5.0);
    CHECK(cfg.chis == std::vector<double>{0.5, 7.5});
    CHECK(cfg.family == "mlp");
    CHECK(cfg.mlp.hidden_layers == std::vector<int>{15, 15});
    CHECK(cfg.mlp.activation == ml::Activation::tanh);
    CHECK(cfg.tune_samples == 4);
    cfg.validate();

    SUBCASE("bad values are rejected") {
        auto bad = cfg;
        bad.mechanism_path = "/nonexistent.mech";
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = cfg;
        bad.chis = {5.0, 1.0};
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = cfg;
        bad.family = "boost";
        CHECK_THROWS(bad.validate());
    }
    SUBCASE("environment overrides output dir and workers only") {
        setenv("FGML_OUTPUT_DIR", "/tmp/fgml_env_dir", 1);
        setenv("FGML_WORKERS", "3", 1);
        auto env_cfg = cfg;
        env_cfg.apply_env_overrides();
        CHECK(env_cfg.output_dir == "/tmp/fgml_env_dir");
        CHECK(env_cfg.workers == 3);
        unsetenv("FGML_OUTPUT_DIR");
        unsetenv("FGML_WORKERS");
    }
}

TEST_CASE("cmd_mech_check") {
    std::ostringstream log;
    CHECK(cmd_mech_check(kMechPath, log) == kExitOk);
    CHECK(log.str().find("7 species, 4 reactions, OK") != std::string::npos);

    std::ostringstream log2;
    CHECK(cmd_mech_check("/does/not/exist.mech", log2) == kExitInput);

    // element imbalance names the reaction index
    fs::path dir = fresh_dir("mech");
    fs::path bad = dir / "bad.mech";
    {
        std::string text = read_file(kMechPath);
        auto pos = text.find("CH4 + O2 => CO + H2 + H2O");
        text.replace(pos, 25, "CH4 + O2 => CO + H2 + 2H2O");
        std::ofstream out(bad);
        out << text;
    }
    std::ostringstream log3;
    CHECK(cmd_mech_check(bad.string(), log3) == kExitInput);
    CHECK(log3.str().find("reaction 0") != std::string::npos);
}

TEST_CASE("cmd_tabulate writes deterministic artifacts") {
    fs::path out1 = fresh_dir("tab1");
    fs::path out2 = fresh_dir("tab2");
    std::ostringstream log;
    auto cfg1 = quick_config(out1);
    REQUIRE(cmd_tabulate(cfg1, log) == kExitOk);
    CHECK(fs::exists(out1 / "library.fgmlib"));
    CHECK(fs::exists(out1 / "dataset.csv"));
    CHECK(log.str().find("steps") != std::string::npos);

    auto cfg2 = quick_config(out2);
    std::ostringstream log2;
    REQUIRE(cmd_tabulate(cfg2, log2) == kExitOk);
    CHECK(read_file((out1 / "library.fgmlib").string()) ==
          read_file((out2 / "library.fgmlib").string()));
    CHECK(read_file((out1 / "dataset.csv").string()) ==
          read_file((out2 / "dataset.csv").string()));

    // the emitted CSV re-parses cleanly
    auto ds = fgm::read_csv_file((out1 / "dataset.csv").string());
    CHECK(ds.size() == 3 * 16);

    SUBCASE("bad config exits with the input code") {
        auto bad = cfg1;
        bad.mechanism_path = "/missing.mech";
        std::ostringstream l;
        CHECK(cmd_tabulate(bad, l) == kExitInput);
    }
}

TEST_CASE("cmd_train produces a model and reports") {
    fs::path out = fresh_dir("train");
    auto cfg = quick_config(out);
    std::ostringstream log;
    REQUIRE(cmd_train(cfg, log) == kExitOk);
    CHECK(fs::exists(out / "model_lr.fgmodel"));
    CHECK(fs::exists(out / "report.csv"));
    CHECK(fs::exists(out / "report_timing.csv"));

    auto model = ml::load_model_file((out / "model_lr.fgmodel").string());
    CHECK(model.family == ml::Family::lr);
    CHECK(model.target_names.front() == "T");

    // timing lives outside the deterministic report
    auto report = read_file((out / "report.csv").string());
    CHECK(report.find("time") == std::string::npos);
    CHECK(report.find("family,status,accuracy,mse,negative_predictions") == 0);

    SUBCASE("report is reproducible") {
        fs::path out2 = fresh_dir("train2");
        auto cfg2 = quick_config(out2);
        std::ostringstream log2;
        REQUIRE(cmd_train(cfg2, log2) == kExitOk);
        CHECK(read_file((out / "report.csv").string()) ==
              read_file((out2 / "report.csv").string()));
        CHECK(read_file((out / "model_lr.fgmodel").string()) ==
              read_file((out2 / "model_lr.fgmodel").string()));
    }
}

TEST_CASE("cmd_compare trains all four families and emits curves") {
    fs::path out = fresh_dir("compare");
    auto cfg = quick_config(out);
    cfg.compare_chi = 5.0;
    std::ostringstream log;
    REQUIRE(cmd_compare(cfg, log) == kExitOk);
    auto table = read_file((out / "comparison.csv").string());
    for (const char* fam : {"mlp", "rf", "lr", "svr"})
        CHECK(table.find(fam) != std::string::npos);

    auto curves = read_file((out / "curves.csv").string());
    std::size_t lines = 0;
    for (char c : curves)
        if (c == '\n') ++lines;
    // header + 4 families x 16 nodes x 8 targets
    CHECK(lines == 1 + 4 * 16 * 8);
}

TEST_CASE("cmd_tune honors budgets and the full-grid gate") {
    fs::path out = fresh_dir("tune");
    auto cfg = quick_config(out);
    std::ostringstream log;
    REQUIRE(cmd_tune(cfg, log) == kExitOk);
    CHECK(fs::exists(out / "tune_top.csv"));
    CHECK(fs::exists(out / "tune_journal.txt"));
    CHECK(log.str().find("accuracy") != std::string::npos);

    SUBCASE("full grid without confirmation refuses with a cost estimate") {
        auto full = cfg;
        full.tune_full = true;
        std::ostringstream log2;
        CHECK(cmd_tune(full, log2) == kExitInput);
        CHECK(log2.str().find("702900") != std::string::npos);
        CHECK(log2.str().find("refusing") != std::string::npos);
    }
}

TEST_CASE("cmd_subset_study emits the error summary") {
    fs::path out = fresh_dir("subset");
    auto cfg = quick_config(out);
    std::ostringstream log;
    REQUIRE(cmd_subset_study(cfg, log) == kExitOk);
    auto csv = read_file((out / "subset_study.csv").string());
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 2); // header + one row per count

    SUBCASE("counts beyond the pool exit with the input code") {
        auto bad = cfg;
        bad.subset_counts = {40};
        std::ostringstream log2;
        CHECK(cmd_subset_study(bad, log2) == kExitInput);
    }
}

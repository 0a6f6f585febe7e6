// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantity so the run reads as a checklist.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fgml/fgm_library.hpp"
#include "fgml/ml.hpp"
#include "fgml/pipeline.hpp"
#include "fgml/rng.hpp"
#include "fgml/tuner.hpp"
#include "helpers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace fgml;
using fgml_test::bundled_mech;
using fgml_test::methane_air_bc;
namespace fs = std::filesystem;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int criterion, bool pass, const std::string& detail, double seconds) {
    std::printf("[criterion %02d] %s  %s (%.1f s)\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str(), seconds);
    std::fflush(stdout);
}

const flamelet::Grid& grid30() {
    static flamelet::Grid g = [] {
        const auto& m = bundled_mech();
        auto bc = methane_air_bc(m);
        return flamelet::Grid::clustered(30, flamelet::stoichiometric_mixture_fraction(m, bc),
                                         4.0);
    }();
    return g;
}

const fgm::FlameletLibrary& table4_library() {
    static fgm::FlameletLibrary lib = [] {
        const auto& m = bundled_mech();
        auto bc = methane_air_bc(m);
        return fgm::tabulate(m, bc, grid30(), {0.01, 5.5, 10.0, 14.5, 20.5, 25.0, 29.5}, {});
    }();
    return lib;
}

const fgm::Dataset& bundled_dataset() {
    static fgm::Dataset ds = fgm::flatten(table4_library());
    return ds;
}

// per-target accuracy along the solved chi = 5 /s curve, the protocol the
// family comparison is judged on
ml::Metrics chi5_metrics(const ml::TrainedModel& model) {
    const auto& m = bundled_mech();
    auto bc = methane_air_bc(m);
    double z_st = flamelet::stoichiometric_mixture_fraction(m, bc);
    static flamelet::FlameletSolution ref = [&] {
        flamelet::ChiProfile prof{5.0, z_st, flamelet::ChiShape::analytic_erfc};
        return flamelet::solve_steady(m, prof, bc, grid30());
    }();
    ml::Matrix pred, truth;
    for (std::size_t j = 0; j < ref.grid.size(); ++j) {
        std::vector<double> x = {ref.grid.z[j], 5.0};
        pred.push_back(ml::predict_scaled(model, {model.scaler.apply_inputs(x)})[0]);
        std::vector<double> y;
        y.push_back(ref.temperature[j]);
        for (double v : ref.mass_fractions[j]) y.push_back(v);
        truth.push_back(model.scaler.apply_targets(y));
    }
    return ml::evaluate_scaled(pred, truth);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("criterion 1: grid independence, 30 vs 120 points at chi = 5") {
    Timer timer;
    const auto& m = bundled_mech();
    auto bc = methane_air_bc(m);
    double z_st = flamelet::stoichiometric_mixture_fraction(m, bc);
    flamelet::ChiProfile prof{5.0, z_st, flamelet::ChiShape::analytic_erfc};
    auto s30 = flamelet::solve_steady(m, prof, bc, flamelet::Grid::clustered(30, z_st, 4.0));
    auto s120 = flamelet::solve_steady(m, prof, bc, flamelet::Grid::clustered(120, z_st, 4.0));
    REQUIRE(s30.converged);
    REQUIRE(s120.converged);
    double maxdiff = 0.0, tmax = 0.0;
    for (std::size_t j = 0; j < s120.grid.size(); ++j) {
        double t30 = flamelet::interp_linear(s30.grid.z, s30.temperature, s120.grid.z[j]);
        maxdiff = std::max(maxdiff, std::abs(t30 - s120.temperature[j]));
        tmax = std::max(tmax, s120.temperature[j]);
    }
    double rel = maxdiff / tmax;
    bool pass = rel < 0.02 && timer.seconds() < 60.0;
    report(1, pass, "temperature profiles differ " + std::to_string(100.0 * rel) + "% (< 2%)",
           timer.seconds());
    CHECK(rel < 0.02);
    CHECK(timer.seconds() < 60.0);
}

TEST_CASE("criterion 2: boundary fidelity of every converged solution") {
    Timer timer;
    const auto& lib = table4_library();
    const auto& bc = lib.bc;
    bool pass = true;
    for (const auto& e : lib.entries) {
        pass = pass && e.converged;
        pass = pass && e.temperature.front() == 300.0 && e.temperature.back() == 300.15;
        pass = pass && e.mass_fractions.front() == bc.y_ox && e.mass_fractions.back() == bc.y_fuel;
    }
    report(2, pass, "T(0) = 300 K, T(1) = 300.15 K, compositions pinned exactly",
           timer.seconds());
    CHECK(pass);
}

TEST_CASE("criterion 3: mass-fraction and element conservation") {
    Timer timer;
    const auto& lib = table4_library();
    double worst_sum = 0.0;
    for (const auto& e : lib.entries)
        for (const auto& y : e.mass_fractions) {
            double sum = 0.0;
            for (double v : y) sum += v;
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }

    const auto& m = bundled_mech();
    Rng rng(1234);
    double worst_element = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        double t = rng.uniform(350.0, 3400.0);
        double rho = rng.uniform(0.05, 5.0);
        std::vector<double> y(m.n_species());
        double sum = 0.0;
        for (auto& v : y) {
            v = rng.uniform01() + 1e-3;
            sum += v;
        }
        for (auto& v : y) v /= sum;
        auto w = mech::production_rates(m, t, rho, y);
        double scale = 0.0;
        for (double v : w) scale = std::max(scale, std::abs(v));
        for (const auto& el : m.elements) {
            double net = 0.0;
            for (std::size_t k = 0; k < m.n_species(); ++k) {
                int nat = m.species[k].atom_count(el);
                if (nat) net += w[k] * nat * mech::atomic_mass(el) / m.species[k].molar_mass;
            }
            if (scale > 0.0) worst_element = std::max(worst_element, std::abs(net) / scale);
        }
    }
    bool pass = worst_sum <= 1e-8 && worst_element <= 1e-10;
    report(3, pass,
           "sum(Y)-1 worst " + std::to_string(worst_sum) + " (<= 1e-8), element residual " +
               std::to_string(worst_element) + " (<= 1e-10 relative)",
           timer.seconds());
    CHECK(worst_sum <= 1e-8);
    CHECK(worst_element <= 1e-10);
}

TEST_CASE("criterion 4: ignited peak location at chi = 0.01") {
    Timer timer;
    const auto& lib = table4_library();
    const auto& sol = lib.entries.front();
    REQUIRE(sol.chi_st == 0.01);
    double zpeak = sol.peak_location();
    bool pass = sol.peak_temperature() > 1500.0 && zpeak >= 0.05 && zpeak <= 0.15;
    report(4, pass,
           "argmax T at Z = " + std::to_string(zpeak) + " (in [0.05, 0.15]), peak " +
               std::to_string(sol.peak_temperature()) + " K",
           timer.seconds());
    CHECK(pass);
}

TEST_CASE("criterion 5: peak temperature non-increasing over the default chi sweep") {
    Timer timer;
    const auto& lib = table4_library();
    bool pass = true;
    double prev = 1e30;
    std::string peaks;
    for (const auto& e : lib.entries) {
        double tp = e.peak_temperature();
        if (tp > prev + 1.0) pass = false;
        prev = tp;
        peaks += (peaks.empty() ? "" : " > ") + std::to_string(static_cast<int>(tp));
    }
    report(5, pass, "peaks [K]: " + peaks, timer.seconds());
    CHECK(pass);
}

TEST_CASE("criterion 6: second-order residual convergence on a manufactured profile") {
    Timer timer;
    auto m = bundled_mech();
    m.reactions.clear();
    flamelet::BoundaryConditions bc = methane_air_bc(m);
    bc.t_ox = 1000.0;
    bc.t_fuel = 1000.0;
    // single-composition state so the residual is purely diffusive
    bc.y_fuel = bc.y_ox;
    flamelet::ChiProfile prof{4.0, 0.5, flamelet::ChiShape::constant};

    auto max_error = [&](int n) {
        auto grid = flamelet::Grid::uniform(n);
        flamelet::FlameletState st;
        st.t.resize(n);
        st.y.assign(n, bc.y_ox);
        for (int j = 0; j < n; ++j)
            st.t[j] = 1000.0 + 200.0 * std::sin(M_PI * grid.z[j]);
        auto f = flamelet::steady_residual(m, prof, bc, grid, st);
        double err = 0.0;
        for (std::size_t a = 0; a < f.t.size(); ++a) {
            double z = grid.z[a + 1];
            double rho = mech::density(m, st.t[a + 1], bc.pressure, st.y[a + 1]);
            double analytic =
                -0.5 * rho * prof.chi_st * 200.0 * M_PI * M_PI * std::sin(M_PI * z);
            err = std::max(err, std::abs(f.t[a] - analytic));
        }
        return err;
    };
    double ratio = max_error(21) / max_error(41);
    bool pass = ratio >= 3.5;
    report(6, pass, "error ratio when halving dZ: " + std::to_string(ratio) + " (>= 3.5)",
           timer.seconds());
    CHECK(pass);
}

TEST_CASE("criterion 7: subset-study mean temperature error shrinks from 3 to 22 libraries") {
    Timer timer;
    const auto& m = bundled_mech();
    auto bc = methane_air_bc(m);
    auto pool = fgm::tabulate(m, bc, grid30(), pipeline::default_pool_chis(), {});
    auto rows = fgm::subset_study(m, pool, {3, 7, 12, 17, 22}, {});
    REQUIRE(rows.size() == 5);
    double e3 = rows.front().temperature.mean_pct;
    double e22 = rows.back().temperature.mean_pct;
    bool pass = e3 > e22 && timer.seconds() < 600.0;
    std::string detail = "mean T error: k=3 " + std::to_string(e3) + "% > k=22 " +
                         std::to_string(e22) + "%";
    report(7, pass, detail, timer.seconds());
    CHECK(e3 > e22);
    CHECK(timer.seconds() < 600.0);
}

TEST_CASE("criterion 8: full hyperparameter grid enumerates 702,900 configurations") {
    Timer timer;
    tuner::SearchSpace space;
    unsigned long long total = space.total_count();
    bool pass = total == 702900ull;
    report(8, pass, "enumerate_space = " + std::to_string(total), timer.seconds());
    CHECK(total == 702900ull);
}

TEST_CASE("criterion 9: analytic MLP gradients match finite differences") {
    Timer timer;
    Rng meta(2024);
    std::size_t probes = 0, failures = 0;
    double worst = 0.0;
    while (probes < 1000) {
        int depth = 1 + static_cast<int>(meta.below(3));
        std::vector<int> sizes = {3};
        for (int l = 0; l < depth; ++l) sizes.push_back(2 + static_cast<int>(meta.below(4)));
        sizes.push_back(2);
        ml::TrainedModel model;
        model.family = ml::Family::mlp;
        model.layer_sizes = sizes;
        model.activation = static_cast<ml::Activation>(meta.below(3));
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            std::vector<double> w(static_cast<std::size_t>(sizes[l]) * sizes[l + 1]);
            for (auto& v : w) v = meta.uniform(-0.8, 0.8);
            std::vector<double> b(sizes[l + 1]);
            for (auto& v : b) v = meta.uniform(-0.3, 0.3);
            model.weights.push_back(std::move(w));
            model.biases.push_back(std::move(b));
        }
        ml::Matrix x, y;
        for (int i = 0; i < 8; ++i) {
            std::vector<double> xi(3), yi(2);
            for (auto& v : xi) v = meta.uniform01();
            for (auto& v : yi) v = meta.uniform(-1.0, 1.0);
            x.push_back(xi);
            y.push_back(yi);
        }
        double alpha = 0.01;
        auto grad = ml::backprop_gradient(model, x, y, alpha);
        for (std::size_t pi = 0; pi < grad.size() && probes < 1000; ++pi, ++probes) {
            auto perturbed = [&](double h) {
                ml::TrainedModel pm = model;
                std::size_t flat = pi;
                for (auto& w : pm.weights) {
                    if (flat < w.size()) {
                        w[flat] += h;
                        return ml::mlp_loss(pm, x, y, alpha);
                    }
                    flat -= w.size();
                }
                for (auto& b : pm.biases) {
                    if (flat < b.size()) {
                        b[flat] += h;
                        return ml::mlp_loss(pm, x, y, alpha);
                    }
                    flat -= b.size();
                }
                return 0.0;
            };
            double h = 1e-6;
            double fd = (perturbed(h) - perturbed(-h)) / (2.0 * h);
            double rel = std::abs(fd - grad[pi]) / std::max({std::abs(fd), std::abs(grad[pi]), 1e-8});
            worst = std::max(worst, rel);
            if (rel >= 1e-4) ++failures;
        }
    }
    bool pass = failures == 0 && timer.seconds() < 60.0;
    report(9, pass,
           std::to_string(probes) + " probes, worst relative error " + std::to_string(worst),
           timer.seconds());
    CHECK(failures == 0);
    CHECK(timer.seconds() < 60.0);
}

TEST_CASE("criterion 10: family ordering on the minor-species column at chi = 5") {
    Timer timer;
    // H2 is the minor intermediate species tracked by the ordering check
    const auto& ds = bundled_dataset();
    auto split = ml::train_test_split(ds.size(), 0.2, 17);
    auto train = ml::select_rows(ds, split.train_rows);
    auto test = ml::select_rows(ds, split.test_rows);

    std::size_t i_minor = 6; // T CH4 O2 CO2 H2O CO H2 N2
    REQUIRE(ds.target_names[i_minor] == "H2");

    ml::MLPConfig mcfg;
    mcfg.tol = 1e-6;
    mcfg.max_iter = 2000;
    mcfg.seed = 1;
    auto mlp = ml::train_mlp(train, mcfg);
    ml::RFConfig rcfg;
    rcfg.seed = 1;
    auto rf = ml::train_rf(train, rcfg);
    ml::LRConfig lcfg;
    lcfg.seed = 1;
    auto lr = ml::train_lr_sgd(train, lcfg);
    ml::SVRConfig scfg;
    scfg.seed = 1;
    auto svr = ml::train_svr(train, scfg);

    double a_mlp = chi5_metrics(mlp).per_target_accuracy[i_minor];
    double a_rf = chi5_metrics(rf).per_target_accuracy[i_minor];
    double a_lr = chi5_metrics(lr).per_target_accuracy[i_minor];

    long long negatives = 0;
    for (const auto& row : ml::predict(svr, test.inputs))
        for (std::size_t t = 1; t < row.size(); ++t)
            if (row[t] < 0.0) ++negatives;

    bool order = a_mlp > a_rf && a_rf > a_lr;
    bool pass = order && timer.seconds() < 300.0;
    std::string detail = "H2 accuracy: MLP " + std::to_string(a_mlp) + " > RF " +
                         std::to_string(a_rf) + " > LR " + std::to_string(a_lr) +
                         "; SVR negative mass-fraction predictions: " + std::to_string(negatives) +
                         (negatives > 0 ? " (flagged)" : " (none this run)");
    report(10, pass, detail, timer.seconds());
    CHECK(order);
    CHECK(negatives >= 0);
    CHECK(timer.seconds() < 300.0);
}

TEST_CASE("criterion 11: uniform 5x15 beats 5x5 by at least 10 accuracy points") {
    Timer timer;
    const auto& ds = bundled_dataset();
    auto split = ml::train_test_split(ds.size(), 0.2, 17);
    auto train = ml::select_rows(ds, split.train_rows);
    auto test = ml::select_rows(ds, split.test_rows);

    auto sweep_train = [&](int width) {
        // uniform-sweep protocol: library defaults (tol 1e-4, 200 epochs)
        ml::MLPConfig cfg;
        cfg.hidden_layers = std::vector<int>(5, width);
        cfg.activation = ml::Activation::relu;
        cfg.solver = ml::Solver::adam;
        cfg.alpha = 1e-4;
        cfg.tol = 1e-4;
        cfg.max_iter = 200;
        cfg.seed = 1;
        return ml::evaluate(ml::train_mlp(train, cfg), test).accuracy;
    };
    double a15 = sweep_train(15);
    double a5 = sweep_train(5);
    bool pass = a15 > a5 && (a15 - a5) >= 10.0;
    report(11, pass,
           "MLP 5x15 " + std::to_string(a15) + " vs 5x5 " + std::to_string(a5) + " (gap " +
               std::to_string(a15 - a5) + " >= 10)",
           timer.seconds());
    CHECK(pass);
}

TEST_CASE("criterion 12: sampled hyperparameter search beats the uniform sweep") {
    Timer timer;
    const auto& ds = bundled_dataset();
    auto split = ml::train_test_split(ds.size(), 0.2, 17);
    auto train = ml::select_rows(ds, split.train_rows);
    auto test = ml::select_rows(ds, split.test_rows);

    // uniform sweep of 25 architectures under the default protocol
    double best_uniform = 0.0;
    std::string best_uniform_name;
    for (int depth = 1; depth <= 5; ++depth)
        for (int width : {5, 10, 15, 20, 25}) {
            ml::MLPConfig cfg;
            cfg.hidden_layers = std::vector<int>(depth, width);
            cfg.activation = ml::Activation::relu;
            cfg.solver = ml::Solver::adam;
            cfg.alpha = 1e-4;
            cfg.tol = 1e-4;
            cfg.max_iter = 200;
            cfg.seed = 1;
            double acc = ml::evaluate(ml::train_mlp(train, cfg), test).accuracy;
            if (acc > best_uniform) {
                best_uniform = acc;
                best_uniform_name = std::to_string(depth) + "x" + std::to_string(width);
            }
        }

    // 400 random configurations from the full 702,900 grid
    tuner::SearchSpace space;
    space.max_iter = 2000;
    space.batch_size = 32;
    space.train_seed = 1;
    auto indices = tuner::sample_indices(space, 400, 7);
    tuner::GridSearchOptions gopts;
    gopts.test_fraction = 0.2;
    gopts.split_seed = 17;
    auto ranked = tuner::grid_search(space, ds, indices, gopts);
    REQUIRE_FALSE(ranked.empty());
    double best_hpt = ranked.front().accuracy;

    // the winning model keeps the fuel-side boundary: T(Z=1, chi=5) near 300.15 K
    auto best_model = ml::train_mlp(train, ranked.front().config);
    double t_boundary = ml::predict(best_model, {1.0, 5.0})[0];

    bool pass = best_hpt >= best_uniform && best_hpt >= 98.0 &&
                std::abs(t_boundary - 300.15) < 5.0 && timer.seconds() < 1800.0;
    std::string detail = "HPT best " + std::to_string(best_hpt) + " (" +
                         tuner::architecture_string(ranked.front().config) + " " +
                         ml::activation_name(ranked.front().config.activation) +
                         ") >= uniform best " + std::to_string(best_uniform) + " (" +
                         best_uniform_name + "), >= 98.0; T(Z=1, chi=5) = " +
                         std::to_string(t_boundary) + " K";
    report(12, pass, detail, timer.seconds());
    CHECK(best_hpt >= best_uniform);
    CHECK(best_hpt >= 98.0);
    CHECK(std::abs(t_boundary - 300.15) < 5.0);
    CHECK(timer.seconds() < 1800.0);
}

TEST_CASE("criterion 13: deterministic artifacts and bit-exact round trips") {
    Timer timer;
    bool pass = true;

    // identical pipeline runs produce byte-identical artifacts
    fs::path base = fs::temp_directory_path() / "fgml_acceptance";
    fs::remove_all(base);
    for (const char* sub : {"run1", "run2"}) {
        pipeline::RunConfig cfg;
        cfg.mechanism_path = std::string(FGML_DATA_DIR) + "/methane4step.mech";
        cfg.output_dir = (base / sub).string();
        cfg.chis = {0.01, 5.5, 10.0};
        cfg.grid_points = 20;
        cfg.family = "lr";
        cfg.lr.epochs = 40;
        cfg.workers = 2;
        std::ostringstream log;
        REQUIRE(pipeline::cmd_tabulate(cfg, log) == pipeline::kExitOk);
        REQUIRE(pipeline::cmd_train(cfg, log) == pipeline::kExitOk);
    }
    for (const char* name : {"library.fgmlib", "dataset.csv", "model_lr.fgmodel", "report.csv"}) {
        bool same = read_file((base / "run1" / name).string()) ==
                    read_file((base / "run2" / name).string());
        if (!same) pass = false;
    }

    // CSV round trip on 10,000 random rows
    {
        Rng rng(909);
        fgm::Dataset ds;
        ds.input_names = {"Z", "chi"};
        ds.target_names = {"T", "a", "b"};
        for (int i = 0; i < 10000; ++i) {
            ds.inputs.push_back({rng.uniform(-5, 5), rng.uniform(0, 1e4)});
            ds.targets.push_back({rng.uniform(-1e8, 1e8) * std::pow(10.0, rng.uniform(-10, 10)),
                                  rng.uniform01(), rng.uniform(-1e-12, 1e-12)});
        }
        std::ostringstream out;
        fgm::write_csv(ds, out);
        std::istringstream in(out.str());
        if (!(fgm::read_csv(in) == ds)) pass = false;
    }

    // library and model round trips
    {
        std::ostringstream out;
        fgm::write_library(table4_library(), out);
        std::istringstream in(out.str());
        if (!(fgm::read_library(in) == table4_library())) pass = false;
    }
    {
        const auto& ds = bundled_dataset();
        ml::RFConfig cfg;
        cfg.n_trees = 10;
        auto model = ml::train_rf(ds, cfg);
        std::ostringstream out;
        ml::save_model(model, out);
        std::istringstream in(out.str());
        if (!(ml::load_model(in) == model)) pass = false;
    }

    report(13, pass, "byte-identical artifacts; CSV/library/model round trips exact",
           timer.seconds());
    CHECK(pass);
}

TEST_CASE("criterion 14: single-tree forest equals the brute-force CART oracle") {
    Timer timer;
    Rng rng(4321);
    fgm::Dataset ds;
    ds.input_names = {"Z", "chi"};
    ds.target_names = {"T"};
    for (int i = 0; i < 50; ++i) {
        ds.inputs.push_back({rng.uniform01(), rng.uniform01()});
        ds.targets.push_back({rng.uniform(-3.0, 3.0)});
    }
    ml::RFConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.max_depth = 0;
    cfg.feature_subsample = 2;
    auto model = ml::train_rf(ds, cfg);

    // brute-force oracle in scaled space (same space the trees learn in)
    auto scaler = ml::ScalerParams::fit(ds);
    ml::Matrix xs = scaler.apply_inputs(ds.inputs);
    std::vector<double> ys(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) ys[i] = scaler.apply_targets(ds.targets[i])[0];

    struct Oracle {
        struct Node {
            int feature = -1;
            double threshold = 0.0;
            int left = -1, right = -1;
            double value = 0.0;
        };
        std::vector<Node> nodes;
        int build(const ml::Matrix& x, const std::vector<double>& y,
                  std::vector<std::size_t> rows) {
            double mean = 0.0;
            for (auto r : rows) mean += y[r];
            mean /= rows.size();
            bool constant = true;
            for (auto r : rows)
                if (y[r] != y[rows[0]]) constant = false;
            if (constant || rows.size() < 2) {
                nodes.push_back({-1, 0.0, -1, -1, mean});
                return static_cast<int>(nodes.size()) - 1;
            }
            bool found = false;
            double best = 0.0, best_thr = 0.0;
            int best_f = -1;
            for (std::size_t f = 0; f < 2; ++f) {
                std::vector<double> vals;
                for (auto r : rows) vals.push_back(x[r][f]);
                std::sort(vals.begin(), vals.end());
                vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
                for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                    double thr = 0.5 * (vals[i] + vals[i + 1]);
                    std::vector<std::size_t> l, r;
                    for (auto row : rows) (x[row][f] <= thr ? l : r).push_back(row);
                    if (l.empty() || r.empty()) continue;
                    auto sse = [&](const std::vector<std::size_t>& part) {
                        double pm = 0.0;
                        for (auto pr : part) pm += y[pr];
                        pm /= part.size();
                        double s = 0.0;
                        for (auto pr : part) s += (y[pr] - pm) * (y[pr] - pm);
                        return s;
                    };
                    double s = sse(l) + sse(r);
                    if (!found || s < best) {
                        found = true;
                        best = s;
                        best_f = static_cast<int>(f);
                        best_thr = thr;
                    }
                }
            }
            if (!found) {
                nodes.push_back({-1, 0.0, -1, -1, mean});
                return static_cast<int>(nodes.size()) - 1;
            }
            std::vector<std::size_t> l, r;
            for (auto row : rows) (x[row][best_f] <= best_thr ? l : r).push_back(row);
            int me = static_cast<int>(nodes.size());
            nodes.push_back({best_f, best_thr, -1, -1, mean});
            int li = build(x, y, l);
            int ri = build(x, y, r);
            nodes[me].left = li;
            nodes[me].right = ri;
            return me;
        }
        double predict(const std::vector<double>& xi) const {
            int i = 0;
            while (nodes[i].feature >= 0)
                i = xi[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
            return nodes[i].value;
        }
    } oracle;
    std::vector<std::size_t> rows(ds.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    oracle.build(xs, ys, rows);

    bool pass = true;
    auto pred = ml::predict_scaled(model, xs);
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (pred[i][0] != oracle.predict(xs[i])) pass = false;

    report(14, pass, "training-set predictions identical on 50 rows", timer.seconds());
    CHECK(pass);
}

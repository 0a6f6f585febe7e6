#include "fgml/pipeline.hpp"
#include "fgml/numio.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fgml::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

ml::MLPConfig RunConfig::make_default_mlp() {
    ml::MLPConfig cfg; // single hidden layer of 100, relu, adam
    cfg.tol = 1e-6;    // train past the lax library default on the small datasets
    cfg.max_iter = 2000;
    return cfg;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, double> composition_of(const json& j) {
    std::map<std::string, double> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<double>();
    return out;
}

void get_if(const json& j, const char* key, double& v) {
    if (j.contains(key)) v = j.at(key).get<double>();
}
void get_if(const json& j, const char* key, int& v) {
    if (j.contains(key)) v = j.at(key).get<int>();
}
void get_if(const json& j, const char* key, bool& v) {
    if (j.contains(key)) v = j.at(key).get<bool>();
}
void get_if(const json& j, const char* key, std::string& v) {
    if (j.contains(key)) v = j.at(key).get<std::string>();
}
void get_if(const json& j, const char* key, std::uint64_t& v) {
    if (j.contains(key)) v = j.at(key).get<std::uint64_t>();
}
void get_if(const json& j, const char* key, long long& v) {
    if (j.contains(key)) v = j.at(key).get<long long>();
}
void get_if(const json& j, const char* key, std::vector<double>& v) {
    if (j.contains(key)) v = j.at(key).get<std::vector<double>>();
}
void get_if(const json& j, const char* key, std::vector<int>& v) {
    if (j.contains(key)) v = j.at(key).get<std::vector<int>>();
}

ml::MLPConfig mlp_from_json(const json& j, ml::MLPConfig base) {
    get_if(j, "hidden_layers", base.hidden_layers);
    if (j.contains("activation"))
        base.activation = ml::activation_from_name(j.at("activation").get<std::string>());
    if (j.contains("solver")) base.solver = ml::solver_from_name(j.at("solver").get<std::string>());
    get_if(j, "alpha", base.alpha);
    get_if(j, "tol", base.tol);
    get_if(j, "max_iter", base.max_iter);
    get_if(j, "batch_size", base.batch_size);
    get_if(j, "seed", base.seed);
    return base;
}

} // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }

    RunConfig cfg;
    try {
        get_if(j, "mechanism", cfg.mechanism_path);
        get_if(j, "output_dir", cfg.output_dir);
        get_if(j, "workers", cfg.workers);
        if (j.contains("boundary")) {
            const auto& b = j.at("boundary");
            get_if(b, "t_ox", cfg.t_ox);
            get_if(b, "t_fuel", cfg.t_fuel);
            get_if(b, "pressure", cfg.pressure);
            if (b.contains("y_ox")) cfg.y_ox = composition_of(b.at("y_ox"));
            if (b.contains("y_fuel")) cfg.y_fuel = composition_of(b.at("y_fuel"));
        }
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            get_if(g, "points", cfg.grid_points);
            get_if(g, "clustering", cfg.clustering);
            get_if(g, "beta", cfg.beta);
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            get_if(s, "max_pseudo_steps", cfg.solve.max_pseudo_steps);
            get_if(s, "dt0", cfg.solve.dt0);
            get_if(s, "residual_tol", cfg.solve.residual_tol);
            get_if(s, "max_newton_per_step", cfg.solve.max_newton_per_step);
        }
        if (j.contains("chi")) {
            const auto& c = j.at("chi");
            get_if(c, "shape", cfg.chi_shape);
            get_if(c, "values", cfg.chis);
        }
        if (j.contains("train")) {
            const auto& t = j.at("train");
            get_if(t, "family", cfg.family);
            get_if(t, "test_fraction", cfg.test_fraction);
            get_if(t, "split_seed", cfg.split_seed);
            if (t.contains("mlp")) cfg.mlp = mlp_from_json(t.at("mlp"), cfg.mlp);
            if (t.contains("lr")) {
                const auto& l = t.at("lr");
                get_if(l, "learning_rate", cfg.lr.learning_rate);
                get_if(l, "epochs", cfg.lr.epochs);
                get_if(l, "batch_size", cfg.lr.batch_size);
                get_if(l, "seed", cfg.lr.seed);
            }
            if (t.contains("rf")) {
                const auto& r = t.at("rf");
                get_if(r, "n_trees", cfg.rf.n_trees);
                get_if(r, "max_depth", cfg.rf.max_depth);
                get_if(r, "min_samples_leaf", cfg.rf.min_samples_leaf);
                get_if(r, "feature_subsample", cfg.rf.feature_subsample);
                get_if(r, "bootstrap", cfg.rf.bootstrap);
                get_if(r, "seed", cfg.rf.seed);
            }
            if (t.contains("svr")) {
                const auto& s = t.at("svr");
                if (s.contains("kernel"))
                    cfg.svr.kernel = s.at("kernel").get<std::string>() == "linear"
                                         ? ml::Kernel::linear
                                         : ml::Kernel::rbf;
                get_if(s, "c", cfg.svr.c);
                get_if(s, "epsilon", cfg.svr.epsilon);
                get_if(s, "gamma", cfg.svr.gamma);
                get_if(s, "max_passes", cfg.svr.max_passes);
                get_if(s, "tol", cfg.svr.tol);
                get_if(s, "seed", cfg.svr.seed);
            }
        }
        if (j.contains("compare")) get_if(j.at("compare"), "chi", cfg.compare_chi);
        if (j.contains("tune")) {
            const auto& t = j.at("tune");
            get_if(t, "samples", cfg.tune_samples);
            get_if(t, "seed", cfg.tune_seed);
            get_if(t, "top_k", cfg.top_k);
            get_if(t, "full", cfg.tune_full);
            get_if(t, "confirm_full", cfg.tune_confirm_full);
            get_if(t, "max_iter", cfg.tune_max_iter);
            get_if(t, "batch_size", cfg.tune_batch_size);
            get_if(t, "train_seed", cfg.tune_train_seed);
        }
        if (j.contains("subset_study")) {
            const auto& s = j.at("subset_study");
            get_if(s, "pool_chis", cfg.pool_chis);
            get_if(s, "counts", cfg.subset_counts);
            get_if(s, "eval_chis", cfg.subset_eval_chis);
        }
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return cfg;
}

void RunConfig::apply_env_overrides() {
    if (const char* dir = std::getenv("FGML_OUTPUT_DIR"); dir && *dir) output_dir = dir;
    if (const char* w = std::getenv("FGML_WORKERS"); w && *w) {
        long long v = 0;
        if (try_parse_int(w, v) && v >= 0) workers = static_cast<int>(v);
    }
}

void RunConfig::validate() const {
    if (!fs::exists(mechanism_path))
        throw ConfigError("mechanism file '" + mechanism_path + "' does not exist");
    if (chis.empty()) throw ConfigError("chi list must not be empty");
    for (std::size_t i = 0; i < chis.size(); ++i) {
        if (!(chis[i] > 0.0)) throw ConfigError("chi values must be positive");
        if (i && !(chis[i] > chis[i - 1])) throw ConfigError("chi values must be ascending");
    }
    if (grid_points < 5) throw ConfigError("grid needs at least 5 points");
    if (clustering != "tanh" && clustering != "uniform")
        throw ConfigError("clustering must be 'tanh' or 'uniform'");
    if (chi_shape != "analytic-erfc" && chi_shape != "constant")
        throw ConfigError("chi shape must be 'analytic-erfc' or 'constant'");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("test fraction must lie in (0, 1)");
    ml::family_from_name(family);
}

std::vector<double> default_pool_chis() {
    std::vector<double> out;
    const double lo = 0.01, hi = 29.5;
    const int n = 27;
    for (int i = 0; i < n; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    out.back() = hi;
    return out;
}

mech::Mechanism load_mechanism(const std::string& path) {
    return mech::parse_mechanism(read_file(path));
}

flamelet::BoundaryConditions boundary_conditions(const RunConfig& cfg, const mech::Mechanism& m) {
    flamelet::BoundaryConditions bc;
    bc.t_ox = cfg.t_ox;
    bc.t_fuel = cfg.t_fuel;
    bc.pressure = cfg.pressure;
    bc.y_ox.assign(m.n_species(), 0.0);
    bc.y_fuel.assign(m.n_species(), 0.0);
    for (const auto& [name, v] : cfg.y_ox) bc.y_ox[m.species_index(name)] = v;
    for (const auto& [name, v] : cfg.y_fuel) bc.y_fuel[m.species_index(name)] = v;
    return bc;
}

flamelet::Grid make_grid(const RunConfig& cfg, const mech::Mechanism& m) {
    if (cfg.clustering == "uniform") return flamelet::Grid::uniform(cfg.grid_points);
    auto bc = boundary_conditions(cfg, m);
    double z_st = flamelet::stoichiometric_mixture_fraction(m, bc);
    return flamelet::Grid::clustered(cfg.grid_points, z_st, cfg.beta);
}

fgm::FlameletLibrary build_library(const RunConfig& cfg, const mech::Mechanism& m) {
    auto bc = boundary_conditions(cfg, m);
    auto grid = make_grid(cfg, m);
    fgm::TabulateOptions topts;
    topts.solve = cfg.solve;
    topts.chi_shape = cfg.chi_shape == "constant" ? flamelet::ChiShape::constant
                                                  : flamelet::ChiShape::analytic_erfc;
    topts.workers = cfg.workers;
    return fgm::tabulate(m, bc, grid, cfg.chis, topts);
}

fgm::Dataset load_or_build_dataset(const RunConfig& cfg, std::ostream& log) {
    fs::path csv = fs::path(cfg.output_dir) / "dataset.csv";
    if (fs::exists(csv)) {
        log << "using dataset " << csv.string() << "\n";
        return fgm::read_csv_file(csv.string());
    }
    log << "dataset not found, tabulating first\n";
    auto m = load_mechanism(cfg.mechanism_path);
    auto lib = build_library(cfg, m);
    auto ds = fgm::flatten(lib);
    fs::create_directories(cfg.output_dir);
    fgm::write_library(lib, (fs::path(cfg.output_dir) / "library.fgmlib").string());
    fgm::write_csv(ds, csv.string());
    return ds;
}

// ---- commands ---------------------------------------------------------------

int cmd_mech_check(const std::string& path, std::ostream& log) {
    try {
        auto m = load_mechanism(path);
        log << path << ": " << m.n_species() << " species, " << m.reactions.size()
            << " reactions, OK\n";
        log << "elements:";
        for (const auto& e : m.elements) log << " " << e;
        log << "\nfingerprint: " << fgm::mechanism_fingerprint(m) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        log << "mechanism check failed: " << e.what() << "\n";
        return kExitInput;
    }
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fgm::IoError("cannot open '" + path + "' for writing");
    out << text;
}

struct FamilyRun {
    std::string family;
    bool ok = false;
    std::string error;
    ml::TrainedModel model;
    ml::TrainReport report;
    long long negative_predictions = 0;
};

FamilyRun run_family(const RunConfig& cfg, const std::string& family, const fgm::Dataset& train,
                     const fgm::Dataset& test) {
    FamilyRun run;
    run.family = family;
    try {
        auto t0 = std::chrono::steady_clock::now();
        if (family == "lr")
            run.model = ml::train_lr_sgd(train, cfg.lr);
        else if (family == "mlp")
            run.model = ml::train_mlp(train, cfg.mlp);
        else if (family == "rf")
            run.model = ml::train_rf(train, cfg.rf);
        else if (family == "svr")
            run.model = ml::train_svr(train, cfg.svr);
        else
            throw ml::InvalidConfig("unknown family '" + family + "'");
        auto t1 = std::chrono::steady_clock::now();
        ml::Metrics metrics = ml::evaluate(run.model, test);
        auto t2 = std::chrono::steady_clock::now();
        run.report.accuracy = metrics.accuracy;
        run.report.mse = metrics.mse;
        run.report.train_time_s = std::chrono::duration<double>(t1 - t0).count();
        run.report.predict_time_s = std::chrono::duration<double>(t2 - t1).count();
        for (std::size_t t = 0; t < test.target_names.size(); ++t)
            run.report.per_target_accuracy.emplace_back(test.target_names[t],
                                                        metrics.per_target_accuracy[t]);

        // negative predicted mass fractions over the test rows (columns
        // beyond the leading temperature target); reported, never clipped
        auto pred = ml::predict(run.model, test.inputs);
        for (const auto& row : pred)
            for (std::size_t t = 1; t < row.size(); ++t)
                if (row[t] < 0.0) ++run.negative_predictions;
        run.ok = true;
    } catch (const std::exception& e) {
        run.error = e.what();
    }
    return run;
}

std::string metrics_csv_header(const std::vector<std::string>& targets) {
    std::string h = "family,status,accuracy,mse,negative_predictions";
    for (const auto& t : targets) h += ",acc_" + t;
    return h + "\n";
}

std::string metrics_csv_row(const FamilyRun& run, std::size_t n_targets) {
    std::string row = run.family;
    if (!run.ok) {
        row += ",failed,,,";
        for (std::size_t i = 0; i < n_targets; ++i) row += ",";
        return row + "\n";
    }
    char acc[32], mse[32];
    std::snprintf(acc, sizeof(acc), "%.4f", run.report.accuracy);
    std::snprintf(mse, sizeof(mse), "%.8f", run.report.mse);
    row += std::string(",ok,") + acc + "," + mse + "," +
           format_int(run.negative_predictions);
    for (const auto& [name, v] : run.report.per_target_accuracy) {
        (void)name;
        std::snprintf(acc, sizeof(acc), "%.4f", v);
        row += std::string(",") + acc;
    }
    return row + "\n";
}

} // namespace

int cmd_tabulate(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
        auto m = load_mechanism(cfg.mechanism_path);
        auto lib = build_library(cfg, m);
        fs::create_directories(cfg.output_dir);
        fgm::write_library(lib, (fs::path(cfg.output_dir) / "library.fgmlib").string());
        auto ds = fgm::flatten(lib);
        fgm::write_csv(ds, (fs::path(cfg.output_dir) / "dataset.csv").string());
        for (const auto& e : lib.entries)
            log << "chi " << format_double(e.chi_st) << ": " << e.steps << " steps, residual "
                << format_double(e.residual_norm) << ", peak T "
                << format_double(e.peak_temperature()) << " K\n";
        log << "library: " << lib.entries.size() << " entries, " << ds.size() << " rows\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fgm::NotConverged& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const mech::MechError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_train(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
        auto ds = load_or_build_dataset(cfg, log);
        auto split = ml::train_test_split(ds.size(), cfg.test_fraction, cfg.split_seed);
        auto train = ml::select_rows(ds, split.train_rows);
        auto test = ml::select_rows(ds, split.test_rows);

        FamilyRun run = run_family(cfg, cfg.family, train, test);
        if (!run.ok) {
            log << "training failed: " << run.error << "\n";
            return kExitNumerical;
        }

        fs::create_directories(cfg.output_dir);
        fs::path model_path = fs::path(cfg.output_dir) / ("model_" + cfg.family + ".fgmodel");
        ml::save_model(run.model, model_path.string());

        std::string report = metrics_csv_header(ds.target_names);
        report += metrics_csv_row(run, ds.target_names.size());
        write_text((fs::path(cfg.output_dir) / "report.csv").string(), report);

        std::string timing = "family,train_time_s,predict_time_s\n";
        timing += cfg.family + "," + format_double(run.report.train_time_s) + "," +
                  format_double(run.report.predict_time_s) + "\n";
        write_text((fs::path(cfg.output_dir) / "report_timing.csv").string(), timing);

        log << "family " << cfg.family << ": accuracy " << run.report.accuracy << ", mse "
            << run.report.mse << " (train " << run.report.train_time_s << " s, predict "
            << run.report.predict_time_s << " s)\n";
        log << "model written to " << model_path.string() << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fgm::LibraryError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_compare(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
        auto ds = load_or_build_dataset(cfg, log);
        auto split = ml::train_test_split(ds.size(), cfg.test_fraction, cfg.split_seed);
        auto train = ml::select_rows(ds, split.train_rows);
        auto test = ml::select_rows(ds, split.test_rows);

        const std::vector<std::string> families = {"mlp", "rf", "lr", "svr"};
        std::vector<FamilyRun> runs;
        for (const auto& f : families) {
            runs.push_back(run_family(cfg, f, train, test));
            const auto& r = runs.back();
            if (r.ok)
                log << f << ": accuracy " << r.report.accuracy << ", mse " << r.report.mse
                    << ", negative predictions " << r.negative_predictions
                    << (r.negative_predictions > 0 ? " (flagged)" : "") << "\n";
            else
                log << f << ": FAILED (" << r.error << ")\n";
        }

        fs::create_directories(cfg.output_dir);
        std::string table = metrics_csv_header(ds.target_names);
        std::string timing = "family,train_time_s,predict_time_s\n";
        for (const auto& r : runs) {
            table += metrics_csv_row(r, ds.target_names.size());
            if (r.ok)
                timing += r.family + "," + format_double(r.report.train_time_s) + "," +
                          format_double(r.report.predict_time_s) + "\n";
        }
        write_text((fs::path(cfg.output_dir) / "comparison.csv").string(), table);
        write_text((fs::path(cfg.output_dir) / "comparison_timing.csv").string(), timing);

        // prediction curves at the configured chi against a fresh solve
        auto m = load_mechanism(cfg.mechanism_path);
        auto bc = boundary_conditions(cfg, m);
        auto grid = make_grid(cfg, m);
        flamelet::ChiProfile prof{cfg.compare_chi,
                                  flamelet::stoichiometric_mixture_fraction(m, bc),
                                  cfg.chi_shape == "constant" ? flamelet::ChiShape::constant
                                                              : flamelet::ChiShape::analytic_erfc};
        auto ref = flamelet::solve_steady(m, prof, bc, grid, cfg.solve);
        if (!ref.converged) throw fgm::NotConverged(cfg.compare_chi);

        std::string curves = "family,target,Z,reference,prediction\n";
        for (const auto& r : runs) {
            if (!r.ok) continue;
            for (std::size_t j = 0; j < grid.size(); ++j) {
                auto pred = ml::predict(r.model, {grid.z[j], cfg.compare_chi});
                for (std::size_t t = 0; t < ds.target_names.size(); ++t) {
                    double reference =
                        t == 0 ? ref.temperature[j] : ref.mass_fractions[j][t - 1];
                    curves += r.family + "," + ds.target_names[t] + "," +
                              format_double(grid.z[j]) + "," + format_double(reference) + "," +
                              format_double(pred[t]) + "\n";
                }
            }
        }
        write_text((fs::path(cfg.output_dir) / "curves.csv").string(), curves);
        log << "comparison written to " << (fs::path(cfg.output_dir) / "comparison.csv").string()
            << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fgm::NotConverged& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_tune(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
        tuner::SearchSpace space;
        space.max_iter = cfg.tune_max_iter;
        space.batch_size = cfg.tune_batch_size;
        space.train_seed = cfg.tune_train_seed;

        std::vector<unsigned long long> indices;
        if (cfg.tune_full) {
            unsigned long long total = space.total_count();
            if (!cfg.tune_confirm_full) {
                log << "full grid requested: " << total << " configurations.\n";
                log << "rough cost: ~" << total / 3600 << " core-hours at 1 s per model.\n";
                log << "refusing without confirm_full=true (tune.confirm_full or --confirm-full).\n";
                return kExitInput;
            }
            indices.resize(total);
            for (unsigned long long i = 0; i < total; ++i) indices[i] = i;
        } else {
            indices = tuner::sample_indices(space, cfg.tune_samples, cfg.tune_seed);
        }

        auto ds = load_or_build_dataset(cfg, log);
        fs::create_directories(cfg.output_dir);
        tuner::GridSearchOptions gopts;
        gopts.test_fraction = cfg.test_fraction;
        gopts.split_seed = cfg.split_seed;
        gopts.journal_path = (fs::path(cfg.output_dir) / "tune_journal.txt").string();
        gopts.workers = cfg.workers;

        auto ranked = tuner::grid_search(space, ds, indices, gopts);

        write_text((fs::path(cfg.output_dir) / "tune_top.csv").string(),
                   tuner::report_top_k_csv(ranked, cfg.top_k));
        std::string text = tuner::report_top_k_text(ranked, cfg.top_k);
        write_text((fs::path(cfg.output_dir) / "tune_top.txt").string(), text);
        log << text;
        if (!ranked.empty() && !ranked.front().failed) {
            const auto& best = ranked.front();
            log << "best: " << tuner::architecture_string(best.config) << " accuracy "
                << best.accuracy << " (bands: " << tuner::band_name(tuner::accuracy_band(best.accuracy))
                << " accuracy, " << tuner::band_name(tuner::mse_band(best.mse)) << " mse)\n";
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_subset_study(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
        auto m = load_mechanism(cfg.mechanism_path);
        RunConfig pool_cfg = cfg;
        pool_cfg.chis = cfg.pool_chis.empty() ? default_pool_chis() : cfg.pool_chis;
        auto pool = build_library(pool_cfg, m);

        fgm::SubsetStudyOptions sopts;
        sopts.solve = cfg.solve;
        sopts.workers = cfg.workers;
        auto rows = fgm::subset_study(m, pool, cfg.subset_counts, cfg.subset_eval_chis, sopts);

        std::string csv =
            "libraries,T_max_err_pct,T_min_err_pct,T_mean_err_pct,"
            "CO2_max_err_pct,CO2_min_err_pct,CO2_mean_err_pct\n";
        for (const auto& r : rows) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%d,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n", r.count,
                          r.temperature.max_pct, r.temperature.min_pct, r.temperature.mean_pct,
                          r.species.max_pct, r.species.min_pct, r.species.mean_pct);
            csv += buf;
            std::snprintf(buf, sizeof(buf),
                          "k=%-3d  T err %%: max %7.3f min %7.3f mean %7.3f   CO2 err %%: max "
                          "%8.3f min %7.3f mean %8.3f\n",
                          r.count, r.temperature.max_pct, r.temperature.min_pct,
                          r.temperature.mean_pct, r.species.max_pct, r.species.min_pct,
                          r.species.mean_pct);
            log << buf;
        }
        fs::create_directories(cfg.output_dir);
        write_text((fs::path(cfg.output_dir) / "subset_study.csv").string(), csv);
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fgm::InsufficientPool& e) {
        log << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace fgml::pipeline

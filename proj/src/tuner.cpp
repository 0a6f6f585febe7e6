#include "fgml/tuner.hpp"
#include "fgml/numio.hpp"
#include "fgml/parallel.hpp"
#include "fgml/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

namespace fgml::tuner {

void SearchSpace::validate() const {
    if (max_layers < 1 || neurons.empty() || activations.empty() || solvers.empty() ||
        alphas.empty() || tolerances.empty())
        throw TunerError("search space has an empty axis");
    for (int n : neurons)
        if (n < 1) throw TunerError("neuron counts must be positive");
}

unsigned long long SearchSpace::architecture_count() const {
    unsigned long long total = 0, block = 1;
    for (int d = 1; d <= max_layers; ++d) {
        block *= neurons.size();
        total += block;
    }
    return total;
}

unsigned long long SearchSpace::total_count() const {
    return architecture_count() * activations.size() * solvers.size() * alphas.size() *
           tolerances.size();
}

ml::MLPConfig SearchSpace::config_at(unsigned long long index) const {
    validate();
    if (index >= total_count()) throw TunerError("config index out of range");

    const unsigned long long n_tol = tolerances.size();
    const unsigned long long n_alpha = alphas.size();
    const unsigned long long n_sol = solvers.size();
    const unsigned long long n_act = activations.size();

    unsigned long long tol_i = index % n_tol;
    index /= n_tol;
    unsigned long long alpha_i = index % n_alpha;
    index /= n_alpha;
    unsigned long long sol_i = index % n_sol;
    index /= n_sol;
    unsigned long long act_i = index % n_act;
    index /= n_act;

    // architecture: depth blocks of |neurons|^d, digits most significant first
    unsigned long long arch = index;
    const unsigned long long base = neurons.size();
    int depth = 1;
    unsigned long long block = base;
    while (arch >= block) {
        arch -= block;
        block *= base;
        ++depth;
    }
    std::vector<int> layers(depth);
    for (int l = depth - 1; l >= 0; --l) {
        layers[l] = neurons[arch % base];
        arch /= base;
    }

    ml::MLPConfig cfg;
    cfg.hidden_layers = layers;
    cfg.activation = activations[act_i];
    cfg.solver = solvers[sol_i];
    cfg.alpha = alphas[alpha_i];
    cfg.tol = tolerances[tol_i];
    cfg.max_iter = max_iter;
    cfg.batch_size = batch_size;
    cfg.seed = train_seed;
    return cfg;
}

std::vector<unsigned long long> sample_indices(const SearchSpace& space, std::size_t n,
                                               std::uint64_t seed) {
    space.validate();
    unsigned long long total = space.total_count();
    if (n >= total) {
        std::vector<unsigned long long> all(total);
        for (unsigned long long i = 0; i < total; ++i) all[i] = i;
        return all;
    }
    Rng rng(seed);
    std::set<unsigned long long> picked;
    while (picked.size() < n) picked.insert(rng.below(total));
    return {picked.begin(), picked.end()};
}

long long parameter_count(const ml::MLPConfig& cfg, int n_inputs, int n_targets) {
    long long count = 0;
    int prev = n_inputs;
    for (int h : cfg.hidden_layers) {
        count += static_cast<long long>(prev + 1) * h;
        prev = h;
    }
    count += static_cast<long long>(prev + 1) * n_targets;
    return count;
}

bool result_before(const TuneResult& a, const TuneResult& b) {
    if (a.failed != b.failed) return !a.failed;
    if (a.failed) return a.index < b.index;
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    if (a.mse != b.mse) return a.mse < b.mse;
    if (a.parameters != b.parameters) return a.parameters < b.parameters;
    return a.index < b.index;
}

// ---- journal ----------------------------------------------------------------

namespace {

std::string config_hash(const ml::MLPConfig& cfg) {
    std::string key = architecture_string(cfg) + "|" + ml::activation_name(cfg.activation) + "|" +
                      ml::solver_name(cfg.solver) + "|" + format_double(cfg.alpha) + "|" +
                      format_double(cfg.tol) + "|" + format_int(cfg.max_iter) + "|" +
                      format_int(cfg.batch_size) + "|" +
                      format_int(static_cast<long long>(cfg.seed));
    return fnv1a64_hex(key);
}

std::string journal_line(const std::string& hash, const TuneResult& r) {
    std::string line = hash + " " + format_int(static_cast<long long>(r.index));
    if (r.failed) {
        line += " fail " + r.failure;
    } else {
        line += " ok " + format_double(r.accuracy) + " " + format_double(r.mse);
        line += " " + format_int(static_cast<long long>(r.per_target_accuracy.size()));
        for (double v : r.per_target_accuracy) line += " " + format_double(v);
    }
    return line;
}

bool parse_journal_line(const std::string& line, std::string& hash, TuneResult& r) {
    std::istringstream in(line);
    std::string status, tok;
    long long index = 0;
    if (!(in >> hash >> index >> status)) return false;
    r = TuneResult{};
    r.index = static_cast<unsigned long long>(index);
    if (status == "fail") {
        r.failed = true;
        std::getline(in, r.failure);
        if (!r.failure.empty() && r.failure.front() == ' ') r.failure.erase(0, 1);
        return true;
    }
    if (status != "ok") return false;
    long long nper = 0;
    std::string acc, mse;
    if (!(in >> acc >> mse >> nper)) return false;
    if (!try_parse_double(acc, r.accuracy) || !try_parse_double(mse, r.mse)) return false;
    for (long long i = 0; i < nper; ++i) {
        double v;
        if (!(in >> tok) || !try_parse_double(tok, v)) return false;
        r.per_target_accuracy.push_back(v);
    }
    return true;
}

} // namespace

std::vector<TuneResult> grid_search(const SearchSpace& space, const fgm::Dataset& ds,
                                    const std::vector<unsigned long long>& indices,
                                    const GridSearchOptions& opts) {
    space.validate();
    ds.validate();
    if (ds.size() < 5) throw TunerError("dataset too small for a split");

    auto split = ml::train_test_split(ds.size(), opts.test_fraction, opts.split_seed);
    fgm::Dataset train = ml::select_rows(ds, split.train_rows);
    fgm::Dataset test = ml::select_rows(ds, split.test_rows);

    // previously completed configs
    std::map<std::string, TuneResult> done;
    if (!opts.journal_path.empty()) {
        std::ifstream in(opts.journal_path);
        std::string line;
        while (in && std::getline(in, line)) {
            if (line.empty()) continue;
            std::string hash;
            TuneResult r;
            if (parse_journal_line(line, hash, r)) {
                r.config = space.config_at(r.index);
                done[hash] = r;
            }
        }
    }

    std::ofstream journal;
    std::mutex journal_mutex;
    if (!opts.journal_path.empty())
        journal.open(opts.journal_path, std::ios::app);

    const int n_inputs = static_cast<int>(ds.input_names.size());
    const int n_targets = static_cast<int>(ds.target_names.size());

    std::vector<TuneResult> results(indices.size());
    int workers = opts.workers > 0 ? opts.workers : default_workers();
    parallel_for(indices.size(), workers, [&](std::size_t i) {
        ml::MLPConfig cfg = space.config_at(indices[i]);
        std::string hash = config_hash(cfg);
        {
            auto it = done.find(hash);
            if (it != done.end()) {
                results[i] = it->second;
                results[i].index = indices[i];
                results[i].config = cfg;
                results[i].parameters = parameter_count(cfg, n_inputs, n_targets);
                return;
            }
        }
        TuneResult r;
        r.index = indices[i];
        r.config = cfg;
        r.parameters = parameter_count(cfg, n_inputs, n_targets);
        try {
            auto t0 = std::chrono::steady_clock::now();
            ml::TrainedModel model = ml::train_mlp(train, cfg);
            auto t1 = std::chrono::steady_clock::now();
            ml::Metrics metrics = ml::evaluate(model, test);
            auto t2 = std::chrono::steady_clock::now();
            r.accuracy = metrics.accuracy;
            r.mse = metrics.mse;
            r.per_target_accuracy = metrics.per_target_accuracy;
            r.train_time_s = std::chrono::duration<double>(t1 - t0).count();
            r.predict_time_s = std::chrono::duration<double>(t2 - t1).count();
        } catch (const std::exception& e) {
            r.failed = true;
            r.failure = e.what();
        }
        results[i] = r;
        if (journal.is_open()) {
            std::lock_guard<std::mutex> lock(journal_mutex);
            journal << journal_line(hash, r) << "\n";
            journal.flush();
        }
    });

    // canonical journal: ascending config index, one line per config
    if (!opts.journal_path.empty()) {
        journal.close();
        std::vector<TuneResult> by_index = results;
        std::sort(by_index.begin(), by_index.end(),
                  [](const TuneResult& a, const TuneResult& b) { return a.index < b.index; });
        std::ofstream out(opts.journal_path, std::ios::trunc);
        for (const auto& r : by_index) out << journal_line(config_hash(r.config), r) << "\n";
    }

    std::sort(results.begin(), results.end(), result_before);
    return results;
}

int accuracy_band(double accuracy) {
    if (accuracy < 50.0) return 0;
    if (accuracy < 60.0) return 1;
    if (accuracy < 80.0) return 2;
    if (accuracy < 90.0) return 3;
    return 4;
}

int mse_band(double mse) {
    if (mse > 0.01) return 0;
    if (mse > 0.005) return 1;
    if (mse > 0.001) return 2;
    if (mse > 0.0005) return 3;
    return 4;
}

std::string band_name(int band) {
    switch (band) {
        case 0: return "unusable";
        case 1: return "poor";
        case 2: return "fair";
        case 3: return "good";
        case 4: return "excellent";
    }
    return "?";
}

std::string architecture_string(const ml::MLPConfig& cfg) {
    std::string s;
    for (std::size_t i = 0; i < cfg.hidden_layers.size(); ++i)
        s += (i ? "-" : "") + format_int(cfg.hidden_layers[i]);
    return s;
}

namespace {

struct Row {
    std::string rank, layers, configuration, activation, solver, alpha, tol, accuracy;
};

std::vector<Row> top_rows(const std::vector<TuneResult>& ranked, std::size_t k) {
    std::vector<Row> rows;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        const auto& r = ranked[i];
        if (r.failed) break;
        Row row;
        row.rank = format_int(static_cast<long long>(i + 1));
        row.layers = format_int(static_cast<long long>(r.config.hidden_layers.size()));
        row.configuration = architecture_string(r.config);
        row.activation = ml::activation_name(r.config.activation);
        row.solver = ml::solver_name(r.config.solver);
        row.alpha = format_double(r.config.alpha);
        row.tol = format_double(r.config.tol);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", r.accuracy);
        row.accuracy = buf;
        rows.push_back(row);
    }
    return rows;
}

} // namespace

std::string report_top_k_csv(const std::vector<TuneResult>& ranked, std::size_t k) {
    std::string out = "rank,hidden_layers,configuration,activation,solver,alpha,tol,accuracy\n";
    for (const auto& r : top_rows(ranked, k))
        out += r.rank + "," + r.layers + "," + r.configuration + "," + r.activation + "," +
               r.solver + "," + r.alpha + "," + r.tol + "," + r.accuracy + "\n";
    return out;
}

std::string report_top_k_text(const std::vector<TuneResult>& ranked, std::size_t k) {
    auto rows = top_rows(ranked, k);
    Row header{"rank", "layers", "configuration", "activation", "solver", "alpha", "tol",
               "accuracy"};
    std::vector<Row> all = {header};
    all.insert(all.end(), rows.begin(), rows.end());
    std::size_t w[8] = {};
    for (const auto& r : all) {
        const std::string* f[8] = {&r.rank, &r.layers, &r.configuration, &r.activation,
                                   &r.solver, &r.alpha, &r.tol, &r.accuracy};
        for (int c = 0; c < 8; ++c) w[c] = std::max(w[c], f[c]->size());
    }
    std::string out;
    for (const auto& r : all) {
        const std::string* f[8] = {&r.rank, &r.layers, &r.configuration, &r.activation,
                                   &r.solver, &r.alpha, &r.tol, &r.accuracy};
        for (int c = 0; c < 8; ++c) {
            out += *f[c];
            out += std::string(w[c] - f[c]->size() + (c == 7 ? 0 : 2), ' ');
        }
        out += "\n";
    }
    return out;
}

} // namespace fgml::tuner

#ifndef FGML_TUNER_HPP
#define FGML_TUNER_HPP

#include "fgml/ml.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fgml::tuner {

struct TunerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hyperparameter grid: depth 1..max_layers with every per-layer neuron choice
// (non-uniform architectures included), crossed with activation, solver,
// alpha and tolerance lists.
struct SearchSpace {
    int max_layers = 5;
    std::vector<int> neurons = {5, 10, 15, 20, 25};
    std::vector<ml::Activation> activations = {ml::Activation::sigmoid, ml::Activation::relu,
                                               ml::Activation::tanh};
    std::vector<ml::Solver> solvers = {ml::Solver::sgd, ml::Solver::adam, ml::Solver::adadelta};
    std::vector<double> alphas = {0.01, 0.05, 0.001, 0.0001};
    std::vector<double> tolerances = {0.01, 0.001, 0.0001, 0.00001, 0.000001};

    // training knobs shared by every candidate
    int max_iter = 500;
    int batch_size = 32;
    std::uint64_t train_seed = 1;

    unsigned long long architecture_count() const; // sum_d |neurons|^d
    unsigned long long total_count() const;

    // Deterministic enumeration order: depth ascending, per-layer neuron
    // digits lexicographic (first layer most significant), then activation,
    // solver, alpha, tolerance — the flat index runs fastest over tolerance.
    ml::MLPConfig config_at(unsigned long long index) const;

    void validate() const;
};

// n distinct config indices drawn uniformly from the space, ascending.
std::vector<unsigned long long> sample_indices(const SearchSpace& space, std::size_t n,
                                               std::uint64_t seed);

struct TuneResult {
    unsigned long long index = 0;
    ml::MLPConfig config;
    long long parameters = 0; // weight + bias count for the trained dimensions
    bool failed = false;
    std::string failure;
    double accuracy = 0.0;
    double mse = 0.0;
    std::vector<double> per_target_accuracy;
    double train_time_s = 0.0;   // excluded from ranking and journal
    double predict_time_s = 0.0;
};

// accuracy desc, then mse asc, then fewer parameters, then index; failed
// entries after all successes (by index). A strict total order.
bool result_before(const TuneResult& a, const TuneResult& b);
long long parameter_count(const ml::MLPConfig& cfg, int n_inputs, int n_targets);

struct GridSearchOptions {
    double test_fraction = 0.2;
    std::uint64_t split_seed = 17;
    std::string journal_path; // empty: in-memory only
    int workers = 0;          // 0: hardware concurrency
};

// Trains every requested config on the train split and ranks by test-split
// metrics. Completed configs found in the journal are reused; the journal is
// rewritten in canonical index order on clean completion.
std::vector<TuneResult> grid_search(const SearchSpace& space, const fgm::Dataset& ds,
                                    const std::vector<unsigned long long>& indices,
                                    const GridSearchOptions& opts = {});

// Accuracy and MSE quality bands, 0 (worst) .. 4 (best). Boundary values get
// the better band.
int accuracy_band(double accuracy);
int mse_band(double mse);
std::string band_name(int band);

// Hidden layers joined with '-', e.g. "10-15-20-15".
std::string architecture_string(const ml::MLPConfig& cfg);

// Table of the k best results: rank, layers, configuration, activation,
// solver, alpha, tol, accuracy.
std::string report_top_k_text(const std::vector<TuneResult>& ranked, std::size_t k);
std::string report_top_k_csv(const std::vector<TuneResult>& ranked, std::size_t k);

} // namespace fgml::tuner

#endif

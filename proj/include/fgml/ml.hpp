#ifndef FGML_ML_HPP
#define FGML_ML_HPP

#include "fgml/fgm_library.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgml::ml {

struct MlError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyDataset : MlError {
    using MlError::MlError;
};
struct Diverged : MlError {
    using MlError::MlError;
};
struct InvalidConfig : MlError {
    using MlError::MlError;
};
struct NotConverged : MlError {
    using MlError::MlError;
};
struct DimensionMismatch : MlError {
    using MlError::MlError;
};
struct ShapeMismatch : MlError {
    using MlError::MlError;
};

using Matrix = std::vector<std::vector<double>>; // row major

// ---- scaling ---------------------------------------------------------------

// Per-column min-max onto [0, 1]; constant columns map to 0.5.
struct ScalerParams {
    std::vector<double> in_min, in_max;
    std::vector<double> out_min, out_max;

    static ScalerParams fit(const fgm::Dataset& ds);

    std::vector<double> apply_inputs(const std::vector<double>& x) const;
    std::vector<double> apply_targets(const std::vector<double>& y) const;
    std::vector<double> invert_targets(const std::vector<double>& s) const;
    Matrix apply_inputs(const Matrix& x) const;
    Matrix apply_targets(const Matrix& y) const;

    bool operator==(const ScalerParams&) const = default;
};

// ---- metrics ---------------------------------------------------------------

// accuracy = 100 (1 - RMSE), with the RMSE taken per scaled column and then
// averaged over targets; mse is the plain mean of squared scaled residuals.
struct Metrics {
    double accuracy = 0.0;
    double mse = 0.0;
    std::vector<double> per_target_accuracy;
};

Metrics evaluate_scaled(const Matrix& pred_scaled, const Matrix& truth_scaled);

// ---- model families -------------------------------------------------------

enum class Family { lr, mlp, rf, svr };
enum class Activation { relu, tanh, sigmoid };
enum class Solver { sgd, adam, adadelta };
enum class Kernel { linear, rbf };

std::string family_name(Family f);
Family family_from_name(const std::string& s);
std::string activation_name(Activation a);
Activation activation_from_name(const std::string& s);
std::string solver_name(Solver s);
Solver solver_from_name(const std::string& s);

struct LRConfig {
    double learning_rate = 0.05;
    int epochs = 1000;
    int batch_size = 32;
    std::uint64_t seed = 1;
};

struct MLPConfig {
    std::vector<int> hidden_layers = {100};
    Activation activation = Activation::relu;
    Solver solver = Solver::adam;
    double alpha = 1e-4; // L2 coefficient
    double tol = 1e-4;   // early-stop improvement threshold
    int max_iter = 2000; // epochs
    int batch_size = 32;
    std::uint64_t seed = 1;
};

struct RFConfig {
    int n_trees = 100;
    int max_depth = 0; // 0: unlimited
    int min_samples_leaf = 1;
    // features drawn per split: 0 = floor(sqrt(d)) (classic default);
    // >= d disables feature sampling
    int feature_subsample = 0;
    bool bootstrap = true;
    std::uint64_t seed = 1;
};

struct SVRConfig {
    Kernel kernel = Kernel::rbf;
    double c = 10.0;
    double epsilon = 0.01;
    double gamma = 10.0; // rbf only
    long long max_passes = 200000;
    double tol = 1e-3;
    std::uint64_t seed = 1;
};

struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;

    bool operator==(const TreeNode&) const = default;
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(const std::vector<double>& x) const;

    bool operator==(const Tree&) const = default;
};

struct SvrMachine {
    Kernel kernel = Kernel::rbf;
    double gamma = 1.0;
    double bias = 0.0;
    std::vector<double> coef;  // beta per support vector
    Matrix support;            // scaled support inputs

    bool operator==(const SvrMachine&) const = default;
};

// Fitted parameters of one family together with its scaler. Immutable after
// training; prediction is pure.
struct TrainedModel {
    Family family = Family::lr;
    ScalerParams scaler;
    std::vector<std::string> input_names, target_names;
    std::string config_echo;

    // lr / mlp: per-layer dense weights, row major (n_out x n_in)
    std::vector<int> layer_sizes; // input, hidden..., output
    Activation activation = Activation::relu;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    std::vector<std::vector<Tree>> forests; // rf: [target][tree]
    std::vector<SvrMachine> machines;       // svr: [target]

    int epochs_run = 0;
    double final_loss = 0.0;

    std::size_t n_inputs() const { return input_names.size(); }
    std::size_t n_targets() const { return target_names.size(); }

    bool operator==(const TrainedModel&) const = default;
};

// ---- training --------------------------------------------------------------

TrainedModel train_lr_sgd(const fgm::Dataset& ds, const LRConfig& cfg);
TrainedModel train_mlp(const fgm::Dataset& ds, const MLPConfig& cfg);
TrainedModel train_rf(const fgm::Dataset& ds, const RFConfig& cfg);
TrainedModel train_svr(const fgm::Dataset& ds, const SVRConfig& cfg);

// Unscaled-units prediction: scales inputs, runs the family forward pass,
// inverts the target scaling.
std::vector<double> predict(const TrainedModel& model, const std::vector<double>& x);
Matrix predict(const TrainedModel& model, const Matrix& x);

// Scaled-space forward pass (used by the metrics pipeline).
Matrix predict_scaled(const TrainedModel& model, const Matrix& x_scaled);

// Flattened analytic gradient of the regularized MLP loss
//   L = mean_(i,t) (pred - y)^2 + alpha * sum(W^2) / n
// over all weights then biases, layer by layer. Exposed for gradient checks.
std::vector<double> backprop_gradient(const TrainedModel& model, const Matrix& x_scaled,
                                      const Matrix& y_scaled, double alpha);
double mlp_loss(const TrainedModel& model, const Matrix& x_scaled, const Matrix& y_scaled,
                double alpha);

// Metrics of a model on raw (unscaled) data, computed in scaled space.
Metrics evaluate(const TrainedModel& model, const fgm::Dataset& ds);

// ---- reports & persistence -------------------------------------------------

struct TrainReport {
    double accuracy = 0.0;
    double mse = 0.0;
    double train_time_s = 0.0;   // wall clock; excluded from determinism
    double predict_time_s = 0.0; // wall clock; excluded from determinism
    std::vector<std::pair<std::string, double>> per_target_accuracy;
};

// 80/20-style split of row indices, seeded and portable.
struct Split {
    std::vector<std::size_t> train_rows, test_rows;
};
Split train_test_split(std::size_t n, double test_fraction, std::uint64_t seed);
fgm::Dataset select_rows(const fgm::Dataset& ds, const std::vector<std::size_t>& rows);

// Versioned text format (docs/model-format.md); round-trips bit-exactly.
void save_model(const TrainedModel& model, std::ostream& out);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(std::istream& in);
TrainedModel load_model_file(const std::string& path);

} // namespace fgml::ml

#endif

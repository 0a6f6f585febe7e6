#include "fgml/ml.hpp"
#include "fgml/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fgml::ml {

Metrics evaluate_scaled(const Matrix& pred_scaled, const Matrix& truth_scaled) {
    if (pred_scaled.size() != truth_scaled.size())
        throw ShapeMismatch("prediction and truth row counts differ");
    if (pred_scaled.empty()) throw ShapeMismatch("cannot evaluate empty matrices");
    const std::size_t n = pred_scaled.size();
    const std::size_t m = truth_scaled.front().size();

    Metrics out;
    out.per_target_accuracy.resize(m);
    double sq_total = 0.0;
    double rmse_sum = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pred_scaled[i].size() != m || truth_scaled[i].size() != m)
                throw ShapeMismatch("ragged metric matrices");
            double d = pred_scaled[i][t] - truth_scaled[i][t];
            sq += d * d;
        }
        double rmse = std::sqrt(sq / n);
        out.per_target_accuracy[t] = std::clamp(100.0 * (1.0 - rmse), 0.0, 100.0);
        rmse_sum += rmse;
        sq_total += sq;
    }
    out.accuracy = std::clamp(100.0 * (1.0 - rmse_sum / m), 0.0, 100.0);
    out.mse = sq_total / (n * m);
    return out;
}

Metrics evaluate(const TrainedModel& model, const fgm::Dataset& ds) {
    ds.validate();
    if (ds.size() == 0) throw EmptyDataset("cannot evaluate on an empty dataset");
    Matrix xs = model.scaler.apply_inputs(ds.inputs);
    Matrix pred_scaled = predict_scaled(model, xs);
    Matrix truth_scaled = model.scaler.apply_targets(ds.targets);
    return evaluate_scaled(pred_scaled, truth_scaled);
}

Split train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0))
        throw InvalidConfig("test fraction must lie in [0, 1)");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
    if (n_test >= n && n > 0) n_test = n - 1;
    Split s;
    s.test_rows.assign(order.begin(), order.begin() + n_test);
    s.train_rows.assign(order.begin() + n_test, order.end());
    std::sort(s.test_rows.begin(), s.test_rows.end());
    std::sort(s.train_rows.begin(), s.train_rows.end());
    return s;
}

fgm::Dataset select_rows(const fgm::Dataset& ds, const std::vector<std::size_t>& rows) {
    fgm::Dataset out;
    out.input_names = ds.input_names;
    out.target_names = ds.target_names;
    for (std::size_t r : rows) {
        out.inputs.push_back(ds.inputs.at(r));
        out.targets.push_back(ds.targets.at(r));
    }
    return out;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::lr: return "lr";
        case Family::mlp: return "mlp";
        case Family::rf: return "rf";
        case Family::svr: return "svr";
    }
    return "?";
}

Family family_from_name(const std::string& s) {
    if (s == "lr") return Family::lr;
    if (s == "mlp") return Family::mlp;
    if (s == "rf") return Family::rf;
    if (s == "svr") return Family::svr;
    throw InvalidConfig("unknown model family '" + s + "'");
}

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    return "?";
}

Activation activation_from_name(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "sigmoid") return Activation::sigmoid;
    throw InvalidConfig("unknown activation '" + s + "'");
}

std::string solver_name(Solver s) {
    switch (s) {
        case Solver::sgd: return "sgd";
        case Solver::adam: return "adam";
        case Solver::adadelta: return "adadelta";
    }
    return "?";
}

Solver solver_from_name(const std::string& s) {
    if (s == "sgd") return Solver::sgd;
    if (s == "adam") return Solver::adam;
    if (s == "adadelta") return Solver::adadelta;
    throw InvalidConfig("unknown solver '" + s + "'");
}

} // namespace fgml::ml

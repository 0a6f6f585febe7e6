#include "ml_internal.hpp"

#include <cmath>

namespace fgml::ml {

using detail::affine;

TrainedModel train_lr_sgd(const fgm::Dataset& ds, const LRConfig& cfg) {
    if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0))
        throw InvalidConfig("bad LR-SGD configuration");
    auto p = detail::prepare(ds);
    const std::size_t n = p.x.size();
    const std::size_t d = p.x.front().size();
    const std::size_t m = p.y.front().size();

    TrainedModel model;
    model.family = Family::lr;
    model.scaler = p.scaler;
    model.input_names = p.input_names;
    model.target_names = p.target_names;
    model.layer_sizes = {static_cast<int>(d), static_cast<int>(m)};
    model.weights = {std::vector<double>(m * d, 0.0)};
    model.biases = {std::vector<double>(m, 0.0)};
    model.config_echo = "family=lr learning_rate=" + format_double(cfg.learning_rate) +
                        " epochs=" + format_int(cfg.epochs) +
                        " batch_size=" + format_int(cfg.batch_size) +
                        " seed=" + format_int(static_cast<long long>(cfg.seed));

    auto loss = [&] {
        double sq = 0.0;
        std::vector<double> pred(m);
        for (std::size_t i = 0; i < n; ++i) {
            affine(model.weights[0], model.biases[0], p.x[i], pred);
            for (std::size_t t = 0; t < m; ++t) {
                double r = pred[t] - p.y[i][t];
                sq += r * r;
            }
        }
        return sq / (n * m);
    };

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<double> grad_w(m * d), grad_b(m), pred(m);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            std::size_t stop = std::min(n, start + cfg.batch_size);
            std::size_t nb = stop - start;
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            std::fill(grad_b.begin(), grad_b.end(), 0.0);
            for (std::size_t s = start; s < stop; ++s) {
                const auto& x = p.x[order[s]];
                const auto& y = p.y[order[s]];
                affine(model.weights[0], model.biases[0], x, pred);
                for (std::size_t t = 0; t < m; ++t) {
                    double g = 2.0 * (pred[t] - y[t]) / (nb * m);
                    grad_b[t] += g;
                    for (std::size_t c = 0; c < d; ++c) grad_w[t * d + c] += g * x[c];
                }
            }
            for (std::size_t i = 0; i < m * d; ++i)
                model.weights[0][i] -= cfg.learning_rate * grad_w[i];
            for (std::size_t t = 0; t < m; ++t)
                model.biases[0][t] -= cfg.learning_rate * grad_b[t];
        }
        model.epochs_run = epoch + 1;
    }

    model.final_loss = loss();
    if (!std::isfinite(model.final_loss))
        throw Diverged("LR-SGD loss became non-finite");
    return model;
}

} // namespace fgml::ml

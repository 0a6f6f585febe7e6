#include "ml_internal.hpp"

#include <cmath>

namespace fgml::ml {

using detail::activate;
using detail::activate_grad;
using detail::affine;

namespace {

// internal step sizes; the tuning grid does not expose a learning rate
#ifndef FGML_SGD_LR
#define FGML_SGD_LR 0.05
#endif
#ifndef FGML_ADAM_LR
#define FGML_ADAM_LR 0.001
#endif
constexpr double kSgdLearningRate = FGML_SGD_LR;
constexpr double kAdamLearningRate = FGML_ADAM_LR;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kAdadeltaRho = 0.95;
constexpr double kAdadeltaEps = 1e-6;
constexpr int kNoImproveLimit = 10;
// deterministic step-size schedule: halve every 500 epochs, floor 1/64
constexpr double kLrHalfLife = 500.0;
constexpr double kLrScaleFloor = 1.0 / 64.0;

struct Net {
    std::vector<int> sizes;
    std::vector<std::vector<double>> w, b;
    Activation act;

    std::size_t layers() const { return w.size(); }
};

// forward keeping every layer's activated output
void forward_all(const Net& net, const std::vector<double>& x,
                 std::vector<std::vector<double>>& a) {
    a.resize(net.layers() + 1);
    a[0] = x;
    for (std::size_t l = 0; l < net.layers(); ++l) {
        a[l + 1].resize(net.sizes[l + 1]);
        affine(net.w[l], net.b[l], a[l], a[l + 1]);
        if (l + 1 < net.layers()) // linear output layer
            for (double& v : a[l + 1]) v = activate(net.act, v);
    }
}

// accumulate the analytic gradient of mean_(i,t) sq + alpha |W|^2 / n
void backprop(const Net& net, const Matrix& xs, const Matrix& ys, double alpha,
              std::vector<std::vector<double>>& gw, std::vector<std::vector<double>>& gb) {
    const std::size_t n = xs.size();
    const std::size_t m = ys.front().size();
    gw.resize(net.layers());
    gb.resize(net.layers());
    for (std::size_t l = 0; l < net.layers(); ++l) {
        gw[l].assign(net.w[l].size(), 0.0);
        gb[l].assign(net.b[l].size(), 0.0);
    }

    std::vector<std::vector<double>> a;
    std::vector<double> delta, delta_prev;
    for (std::size_t i = 0; i < n; ++i) {
        forward_all(net, xs[i], a);
        delta.resize(m);
        for (std::size_t t = 0; t < m; ++t)
            delta[t] = 2.0 * (a.back()[t] - ys[i][t]) / (n * m);
        for (std::size_t l = net.layers(); l-- > 0;) {
            const auto& in = a[l];
            for (std::size_t r = 0; r < delta.size(); ++r) {
                gb[l][r] += delta[r];
                double* gwr = &gw[l][r * in.size()];
                for (std::size_t c = 0; c < in.size(); ++c) gwr[c] += delta[r] * in[c];
            }
            if (l == 0) break;
            delta_prev.assign(in.size(), 0.0);
            for (std::size_t r = 0; r < delta.size(); ++r) {
                const double* wr = &net.w[l][r * in.size()];
                for (std::size_t c = 0; c < in.size(); ++c) delta_prev[c] += wr[c] * delta[r];
            }
            for (std::size_t c = 0; c < in.size(); ++c)
                delta_prev[c] *= activate_grad(net.act, in[c]);
            delta = delta_prev;
        }
    }
    for (std::size_t l = 0; l < net.layers(); ++l)
        for (std::size_t i = 0; i < net.w[l].size(); ++i)
            gw[l][i] += 2.0 * alpha * net.w[l][i] / n;
}

double net_loss(const Net& net, const Matrix& xs, const Matrix& ys, double alpha) {
    const std::size_t n = xs.size();
    const std::size_t m = ys.front().size();
    double sq = 0.0;
    std::vector<std::vector<double>> a;
    for (std::size_t i = 0; i < n; ++i) {
        forward_all(net, xs[i], a);
        for (std::size_t t = 0; t < m; ++t) {
            double r = a.back()[t] - ys[i][t];
            sq += r * r;
        }
    }
    double l2 = 0.0;
    for (const auto& w : net.w)
        for (double v : w) l2 += v * v;
    return sq / (n * m) + alpha * l2 / n;
}

Net net_of(const TrainedModel& model) {
    Net net;
    net.sizes = model.layer_sizes;
    net.w = model.weights;
    net.b = model.biases;
    net.act = model.activation;
    return net;
}

struct SolverState {
    double lr_scale = 1.0; // plateau decay for sgd/adam
    // adam
    std::vector<std::vector<double>> mw, vw, mb, vb;
    long long t = 0;
    // adadelta
    std::vector<std::vector<double>> eg_w, ex_w, eg_b, ex_b;
};

void apply_update(Net& net, SolverState& st, Solver solver,
                  const std::vector<std::vector<double>>& gw,
                  const std::vector<std::vector<double>>& gb) {
    auto ensure = [&](std::vector<std::vector<double>>& s,
                      const std::vector<std::vector<double>>& like) {
        if (s.size() != like.size()) {
            s.resize(like.size());
            for (std::size_t l = 0; l < like.size(); ++l) s[l].assign(like[l].size(), 0.0);
        }
    };

    switch (solver) {
        case Solver::sgd: {
            double lr = kSgdLearningRate * st.lr_scale;
            for (std::size_t l = 0; l < net.w.size(); ++l) {
                for (std::size_t i = 0; i < net.w[l].size(); ++i)
                    net.w[l][i] -= lr * gw[l][i];
                for (std::size_t i = 0; i < net.b[l].size(); ++i)
                    net.b[l][i] -= lr * gb[l][i];
            }
            break;
        }
        case Solver::adam: {
            ensure(st.mw, gw);
            ensure(st.vw, gw);
            ensure(st.mb, gb);
            ensure(st.vb, gb);
            ++st.t;
            double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(st.t));
            double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(st.t));
            double lr = kAdamLearningRate * st.lr_scale;
            auto step = [&](std::vector<double>& p, std::vector<double>& mm,
                            std::vector<double>& vv, const std::vector<double>& g) {
                for (std::size_t i = 0; i < p.size(); ++i) {
                    mm[i] = kAdamBeta1 * mm[i] + (1.0 - kAdamBeta1) * g[i];
                    vv[i] = kAdamBeta2 * vv[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
                    double mhat = mm[i] / c1, vhat = vv[i] / c2;
                    p[i] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
                }
            };
            for (std::size_t l = 0; l < net.w.size(); ++l) {
                step(net.w[l], st.mw[l], st.vw[l], gw[l]);
                step(net.b[l], st.mb[l], st.vb[l], gb[l]);
            }
            break;
        }
        case Solver::adadelta: {
            ensure(st.eg_w, gw);
            ensure(st.ex_w, gw);
            ensure(st.eg_b, gb);
            ensure(st.ex_b, gb);
            auto step = [&](std::vector<double>& p, std::vector<double>& eg,
                            std::vector<double>& ex, const std::vector<double>& g) {
                for (std::size_t i = 0; i < p.size(); ++i) {
                    eg[i] = kAdadeltaRho * eg[i] + (1.0 - kAdadeltaRho) * g[i] * g[i];
                    double dx = -std::sqrt(ex[i] + kAdadeltaEps) /
                                std::sqrt(eg[i] + kAdadeltaEps) * g[i];
                    ex[i] = kAdadeltaRho * ex[i] + (1.0 - kAdadeltaRho) * dx * dx;
                    p[i] += dx;
                }
            };
            for (std::size_t l = 0; l < net.w.size(); ++l) {
                step(net.w[l], st.eg_w[l], st.ex_w[l], gw[l]);
                step(net.b[l], st.eg_b[l], st.ex_b[l], gb[l]);
            }
            break;
        }
    }
}

std::string echo_of(const MLPConfig& cfg) {
    std::string layers;
    for (std::size_t i = 0; i < cfg.hidden_layers.size(); ++i)
        layers += (i ? "-" : "") + format_int(cfg.hidden_layers[i]);
    return "family=mlp hidden=" + layers + " activation=" + activation_name(cfg.activation) +
           " solver=" + solver_name(cfg.solver) + " alpha=" + format_double(cfg.alpha) +
           " tol=" + format_double(cfg.tol) + " max_iter=" + format_int(cfg.max_iter) +
           " batch_size=" + format_int(cfg.batch_size) +
           " seed=" + format_int(static_cast<long long>(cfg.seed));
}

} // namespace

TrainedModel train_mlp(const fgm::Dataset& ds, const MLPConfig& cfg) {
    if (cfg.hidden_layers.empty()) throw InvalidConfig("MLP needs at least one hidden layer");
    for (int h : cfg.hidden_layers)
        if (h < 1) throw InvalidConfig("hidden layer sizes must be positive");
    if (cfg.alpha < 0.0 || !(cfg.tol > 0.0) || cfg.max_iter < 0 || cfg.batch_size < 1)
        throw InvalidConfig("bad MLP configuration");

    auto p = detail::prepare(ds);
    const std::size_t n = p.x.size();
    const std::size_t d = p.x.front().size();
    const std::size_t m = p.y.front().size();

    Net net;
    net.act = cfg.activation;
    net.sizes.push_back(static_cast<int>(d));
    for (int h : cfg.hidden_layers) net.sizes.push_back(h);
    net.sizes.push_back(static_cast<int>(m));

    Rng rng(cfg.seed);
    for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
        int fan_in = net.sizes[l], fan_out = net.sizes[l + 1];
        double limit = std::sqrt(6.0 / (fan_in + fan_out));
        if (cfg.activation == Activation::relu) limit *= std::sqrt(2.0);
        std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
        for (double& v : w) v = rng.uniform(-limit, limit);
        net.w.push_back(std::move(w));
        net.b.emplace_back(fan_out, 0.0);
    }

    SolverState sstate;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    double best_loss = net_loss(net, p.x, p.y, cfg.alpha);
    int no_improve = 0;
    int epochs_run = 0;

    Matrix bx, by;
    std::vector<std::vector<double>> gw, gb;
    for (int epoch = 0; epoch < cfg.max_iter; ++epoch) {
        sstate.lr_scale = std::max(std::pow(0.5, epoch / kLrHalfLife), kLrScaleFloor);
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            std::size_t stop = std::min(n, start + cfg.batch_size);
            bx.clear();
            by.clear();
            for (std::size_t s = start; s < stop; ++s) {
                bx.push_back(p.x[order[s]]);
                by.push_back(p.y[order[s]]);
            }
            backprop(net, bx, by, cfg.alpha, gw, gb);
            apply_update(net, sstate, cfg.solver, gw, gb);
        }
        epochs_run = epoch + 1;

        double loss = net_loss(net, p.x, p.y, cfg.alpha);
        if (!std::isfinite(loss)) throw Diverged("MLP loss became non-finite");
        if (best_loss - loss < cfg.tol) {
            if (++no_improve >= kNoImproveLimit) break;
        } else {
            no_improve = 0;
        }
        best_loss = std::min(best_loss, loss);
    }

    TrainedModel model;
    model.family = Family::mlp;
    model.scaler = p.scaler;
    model.input_names = p.input_names;
    model.target_names = p.target_names;
    model.layer_sizes = net.sizes;
    model.activation = net.act;
    model.weights = std::move(net.w);
    model.biases = std::move(net.b);
    model.config_echo = echo_of(cfg);
    model.epochs_run = epochs_run;
    model.final_loss = best_loss;
    return model;
}

std::vector<double> backprop_gradient(const TrainedModel& model, const Matrix& x_scaled,
                                      const Matrix& y_scaled, double alpha) {
    if (model.family != Family::mlp && model.family != Family::lr)
        throw InvalidConfig("backprop_gradient needs a dense-layer model");
    if (x_scaled.empty() || x_scaled.size() != y_scaled.size())
        throw ShapeMismatch("bad gradient batch");
    Net net = net_of(model);
    std::vector<std::vector<double>> gw, gb;
    backprop(net, x_scaled, y_scaled, alpha, gw, gb);
    std::vector<double> flat;
    for (const auto& g : gw) flat.insert(flat.end(), g.begin(), g.end());
    for (const auto& g : gb) flat.insert(flat.end(), g.begin(), g.end());
    return flat;
}

double mlp_loss(const TrainedModel& model, const Matrix& x_scaled, const Matrix& y_scaled,
                double alpha) {
    Net net = net_of(model);
    return net_loss(net, x_scaled, y_scaled, alpha);
}

Matrix predict_scaled(const TrainedModel& model, const Matrix& x_scaled) {
    Matrix out;
    out.reserve(x_scaled.size());
    switch (model.family) {
        case Family::lr:
        case Family::mlp: {
            Net net = net_of(model);
            std::vector<std::vector<double>> a;
            for (const auto& x : x_scaled) {
                if (x.size() != static_cast<std::size_t>(net.sizes.front()))
                    throw DimensionMismatch("input width does not match the model");
                forward_all(net, x, a);
                out.push_back(a.back());
            }
            break;
        }
        case Family::rf: {
            for (const auto& x : x_scaled) {
                std::vector<double> row(model.forests.size());
                for (std::size_t t = 0; t < model.forests.size(); ++t) {
                    double acc = 0.0;
                    for (const auto& tree : model.forests[t]) acc += tree.predict(x);
                    row[t] = acc / model.forests[t].size();
                }
                out.push_back(std::move(row));
            }
            break;
        }
        case Family::svr: {
            for (const auto& x : x_scaled) {
                std::vector<double> row(model.machines.size());
                for (std::size_t t = 0; t < model.machines.size(); ++t) {
                    const auto& mach = model.machines[t];
                    double acc = mach.bias;
                    for (std::size_t s = 0; s < mach.coef.size(); ++s) {
                        const auto& sv = mach.support[s];
                        double k;
                        if (mach.kernel == Kernel::linear) {
                            k = 0.0;
                            for (std::size_t c = 0; c < x.size(); ++c) k += sv[c] * x[c];
                        } else {
                            double d2 = 0.0;
                            for (std::size_t c = 0; c < x.size(); ++c) {
                                double dd = sv[c] - x[c];
                                d2 += dd * dd;
                            }
                            k = std::exp(-mach.gamma * d2);
                        }
                        acc += mach.coef[s] * k;
                    }
                    row[t] = acc;
                }
                out.push_back(std::move(row));
            }
            break;
        }
    }
    return out;
}

std::vector<double> predict(const TrainedModel& model, const std::vector<double>& x) {
    if (x.size() != model.n_inputs())
        throw DimensionMismatch("input has " + std::to_string(x.size()) + " values, model expects " +
                                std::to_string(model.n_inputs()));
    Matrix xs = {model.scaler.apply_inputs(x)};
    Matrix scaled = predict_scaled(model, xs);
    return model.scaler.invert_targets(scaled.front());
}

Matrix predict(const TrainedModel& model, const Matrix& x) {
    Matrix out;
    out.reserve(x.size());
    for (const auto& row : x) out.push_back(predict(model, row));
    return out;
}

} // namespace fgml::ml

#include "ml_internal.hpp"

#include <cmath>

namespace fgml::ml {

namespace {

double kernel_eval(Kernel kernel, double gamma, const std::vector<double>& a,
                   const std::vector<double>& b) {
    if (kernel == Kernel::linear) {
        double k = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c) k += a[c] * b[c];
        return k;
    }
    double d2 = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        double d = a[c] - b[c];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

// SMO over the 2n duals (alpha, alpha*) with maximal-violating-pair
// selection. Coordinates p < n carry sign +1, p >= n sign -1; the kernel row
// of coordinate p is that of sample p mod n.
SvrMachine train_one(const Matrix& x, const std::vector<double>& y, const SVRConfig& cfg) {
    const std::size_t n = x.size();
    std::vector<double> kmat(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double k = kernel_eval(cfg.kernel, cfg.gamma, x[i], x[j]);
            kmat[i * n + j] = k;
            kmat[j * n + i] = k;
        }

    std::vector<double> dual(2 * n, 0.0);
    std::vector<double> grad(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = cfg.epsilon - y[i];     // alpha_i
        grad[n + i] = cfg.epsilon + y[i]; // alpha*_i
    }
    auto sign = [&](std::size_t p) { return p < n ? 1.0 : -1.0; };
    auto sample = [&](std::size_t p) { return p < n ? p : p - n; };

    double m_val = 0.0, big_m_val = 0.0;
    long long pass = 0;
    for (;; ++pass) {
        // maximal violating pair
        std::size_t i = 2 * n, j = 2 * n;
        m_val = -1e300;
        big_m_val = 1e300;
        for (std::size_t p = 0; p < 2 * n; ++p) {
            double s = sign(p);
            double v = -s * grad[p];
            bool in_up = (s > 0.0 && dual[p] < cfg.c) || (s < 0.0 && dual[p] > 0.0);
            bool in_low = (s > 0.0 && dual[p] > 0.0) || (s < 0.0 && dual[p] < cfg.c);
            if (in_up && v > m_val) {
                m_val = v;
                i = p;
            }
            if (in_low && v < big_m_val) {
                big_m_val = v;
                j = p;
            }
        }
        if (i >= 2 * n || j >= 2 * n || m_val - big_m_val < cfg.tol) break;
        if (pass >= cfg.max_passes)
            throw NotConverged("SVR did not satisfy KKT within " +
                               std::to_string(cfg.max_passes) + " passes");

        std::size_t si = sample(i), sj = sample(j);
        double eta = kmat[si * n + si] + kmat[sj * n + sj] - 2.0 * kmat[si * n + sj];
        if (eta < 1e-12) eta = 1e-12;
        double delta = (m_val - big_m_val) / eta;

        // box bounds on delta: dual[i] += s_i delta, dual[j] -= s_j delta
        double lo = -1e300, hi = 1e300;
        if (sign(i) > 0.0) {
            lo = std::max(lo, -dual[i]);
            hi = std::min(hi, cfg.c - dual[i]);
        } else {
            lo = std::max(lo, dual[i] - cfg.c);
            hi = std::min(hi, dual[i]);
        }
        if (sign(j) > 0.0) {
            lo = std::max(lo, dual[j] - cfg.c);
            hi = std::min(hi, dual[j]);
        } else {
            lo = std::max(lo, -dual[j]);
            hi = std::min(hi, cfg.c - dual[j]);
        }
        delta = std::clamp(delta, lo, hi);
        if (delta == 0.0) break; // numerically pinned

        dual[i] = std::clamp(dual[i] + sign(i) * delta, 0.0, cfg.c);
        dual[j] = std::clamp(dual[j] - sign(j) * delta, 0.0, cfg.c);
        for (std::size_t p = 0; p < 2 * n; ++p)
            grad[p] += sign(p) * delta * (kmat[sample(p) * n + si] - kmat[sample(p) * n + sj]);
    }

    SvrMachine mach;
    mach.kernel = cfg.kernel;
    mach.gamma = cfg.gamma;
    mach.bias = 0.5 * (m_val + big_m_val);
    if (!std::isfinite(mach.bias)) mach.bias = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double beta = dual[s] - dual[n + s];
        if (beta != 0.0) {
            mach.coef.push_back(beta);
            mach.support.push_back(x[s]);
        }
    }
    return mach;
}

} // namespace

TrainedModel train_svr(const fgm::Dataset& ds, const SVRConfig& cfg) {
    if (!(cfg.c > 0.0) || cfg.epsilon < 0.0 || !(cfg.tol > 0.0) ||
        (cfg.kernel == Kernel::rbf && !(cfg.gamma > 0.0)))
        throw InvalidConfig("bad SVR configuration");
    auto p = detail::prepare(ds);
    const std::size_t m = p.y.front().size();

    TrainedModel model;
    model.family = Family::svr;
    model.scaler = p.scaler;
    model.input_names = p.input_names;
    model.target_names = p.target_names;
    model.config_echo =
        std::string("family=svr kernel=") + (cfg.kernel == Kernel::linear ? "linear" : "rbf") +
        " c=" + format_double(cfg.c) + " epsilon=" + format_double(cfg.epsilon) +
        " gamma=" + format_double(cfg.gamma) + " max_passes=" + format_int(cfg.max_passes) +
        " tol=" + format_double(cfg.tol) + " seed=" + format_int(static_cast<long long>(cfg.seed));

    for (std::size_t t = 0; t < m; ++t) {
        std::vector<double> column(p.y.size());
        for (std::size_t i = 0; i < p.y.size(); ++i) column[i] = p.y[i][t];
        model.machines.push_back(train_one(p.x, column, cfg));
    }
    return model;
}

} // namespace fgml::ml

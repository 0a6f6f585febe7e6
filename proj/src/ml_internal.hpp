#ifndef FGML_ML_INTERNAL_HPP
#define FGML_ML_INTERNAL_HPP

#include "fgml/ml.hpp"
#include "fgml/numio.hpp"
#include "fgml/rng.hpp"

namespace fgml::ml::detail {

struct Prepared {
    Matrix x, y; // scaled
    ScalerParams scaler;
    std::vector<std::string> input_names, target_names;
};

inline Prepared prepare(const fgm::Dataset& ds) {
    ds.validate();
    if (ds.size() == 0) throw EmptyDataset("dataset has no rows");
    Prepared p;
    p.scaler = ScalerParams::fit(ds);
    p.x = p.scaler.apply_inputs(ds.inputs);
    p.y = p.scaler.apply_targets(ds.targets);
    p.input_names = ds.input_names;
    p.target_names = ds.target_names;
    return p;
}

// dense layer forward: out = act(W x + b)
inline void affine(const std::vector<double>& w, const std::vector<double>& b,
                   const std::vector<double>& in, std::vector<double>& out) {
    const std::size_t n_out = b.size(), n_in = in.size();
    for (std::size_t r = 0; r < n_out; ++r) {
        double acc = b[r];
        const double* wr = &w[r * n_in];
        for (std::size_t c = 0; c < n_in; ++c) acc += wr[c] * in[c];
        out[r] = acc;
    }
}

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::tanh: return std::tanh(z);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

// derivative expressed through the activated value
inline double activate_grad(Activation a, double out) {
    switch (a) {
        case Activation::relu: return out > 0.0 ? 1.0 : 0.0;
        case Activation::tanh: return 1.0 - out * out;
        case Activation::sigmoid: return out * (1.0 - out);
    }
    return 1.0;
}

} // namespace fgml::ml::detail

#endif

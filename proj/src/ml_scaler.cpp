#include "fgml/ml.hpp"

#include <cmath>

namespace fgml::ml {

namespace {

void fit_columns(const Matrix& rows, std::vector<double>& mins, std::vector<double>& maxs) {
    const std::size_t d = rows.front().size();
    mins.assign(d, 0.0);
    maxs.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double lo = rows[0][c], hi = rows[0][c];
        for (const auto& r : rows) {
            lo = std::min(lo, r[c]);
            hi = std::max(hi, r[c]);
        }
        mins[c] = lo;
        maxs[c] = hi;
    }
}

double scale_one(double v, double lo, double hi) {
    if (hi > lo) return (v - lo) / (hi - lo);
    return 0.5; // constant column
}

double invert_one(double s, double lo, double hi) {
    if (hi > lo) return lo + s * (hi - lo);
    return lo;
}

} // namespace

ScalerParams ScalerParams::fit(const fgm::Dataset& ds) {
    ds.validate();
    if (ds.size() == 0) throw EmptyDataset("cannot fit a scaler on an empty dataset");
    ScalerParams p;
    fit_columns(ds.inputs, p.in_min, p.in_max);
    fit_columns(ds.targets, p.out_min, p.out_max);
    return p;
}

std::vector<double> ScalerParams::apply_inputs(const std::vector<double>& x) const {
    if (x.size() != in_min.size()) throw DimensionMismatch("input length does not match scaler");
    std::vector<double> out(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = scale_one(x[c], in_min[c], in_max[c]);
    return out;
}

std::vector<double> ScalerParams::apply_targets(const std::vector<double>& y) const {
    if (y.size() != out_min.size()) throw DimensionMismatch("target length does not match scaler");
    std::vector<double> out(y.size());
    for (std::size_t c = 0; c < y.size(); ++c) out[c] = scale_one(y[c], out_min[c], out_max[c]);
    return out;
}

std::vector<double> ScalerParams::invert_targets(const std::vector<double>& s) const {
    if (s.size() != out_min.size()) throw DimensionMismatch("target length does not match scaler");
    std::vector<double> out(s.size());
    for (std::size_t c = 0; c < s.size(); ++c) out[c] = invert_one(s[c], out_min[c], out_max[c]);
    return out;
}

Matrix ScalerParams::apply_inputs(const Matrix& x) const {
    Matrix out;
    out.reserve(x.size());
    for (const auto& r : x) out.push_back(apply_inputs(r));
    return out;
}

Matrix ScalerParams::apply_targets(const Matrix& y) const {
    Matrix out;
    out.reserve(y.size());
    for (const auto& r : y) out.push_back(apply_targets(r));
    return out;
}

} // namespace fgml::ml

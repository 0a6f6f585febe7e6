#include "ml_internal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fgml::ml {

double Tree::predict(const std::vector<double>& x) const {
    int i = 0;
    while (nodes[i].feature >= 0)
        i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
}

namespace {

struct TreeBuilder {
    const Matrix& x;
    const std::vector<double>& y;
    const RFConfig& cfg;
    int split_features; // resolved feature_subsample
    Rng& rng;
    std::vector<TreeNode> nodes;

    int build(std::vector<std::size_t>& rows, int depth) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t r : rows) {
            sum += y[r];
            sum2 += y[r] * y[r];
        }
        const double n = static_cast<double>(rows.size());
        const double mean = sum / n;
        const double sse = sum2 - sum * sum / n;

        auto leaf = [&] {
            nodes.push_back({-1, 0.0, -1, -1, mean});
            return static_cast<int>(nodes.size()) - 1;
        };

        if (sse <= 0.0) return leaf();
        if (cfg.max_depth > 0 && depth >= cfg.max_depth) return leaf();
        if (rows.size() < 2 * static_cast<std::size_t>(cfg.min_samples_leaf)) return leaf();

        const std::size_t d = x.front().size();
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), 0);
        if (static_cast<std::size_t>(split_features) < d) {
            // partial Fisher-Yates draw of the split's candidate features
            for (int i = 0; i < split_features; ++i) {
                std::size_t j = i + static_cast<std::size_t>(rng.below(d - i));
                std::swap(features[i], features[j]);
            }
            features.resize(split_features);
            std::sort(features.begin(), features.end());
        }

        // best split: strictly smallest child SSE; ties keep the first
        // candidate in (feature order, ascending threshold) order
        bool found = false;
        double best_sse = 0.0, best_threshold = 0.0;
        std::size_t best_feature = 0;
        std::vector<std::size_t> sorted(rows);
        for (std::size_t f : features) {
            std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                if (x[a][f] != x[b][f]) return x[a][f] < x[b][f];
                return a < b;
            });
            double left_sum = 0.0, left_sum2 = 0.0;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                double yi = y[sorted[i]];
                left_sum += yi;
                left_sum2 += yi * yi;
                if (x[sorted[i]][f] == x[sorted[i + 1]][f]) continue;
                std::size_t nl = i + 1, nr = sorted.size() - nl;
                if (nl < static_cast<std::size_t>(cfg.min_samples_leaf) ||
                    nr < static_cast<std::size_t>(cfg.min_samples_leaf))
                    continue;
                double right_sum = sum - left_sum;
                double right_sum2 = sum2 - left_sum2;
                double child_sse = (left_sum2 - left_sum * left_sum / nl) +
                                   (right_sum2 - right_sum * right_sum / nr);
                if (!found || child_sse < best_sse) {
                    found = true;
                    best_sse = child_sse;
                    best_feature = f;
                    best_threshold = 0.5 * (x[sorted[i]][f] + x[sorted[i + 1]][f]);
                }
            }
        }
        if (!found) return leaf();

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows)
            (x[r][best_feature] <= best_threshold ? left_rows : right_rows).push_back(r);
        if (left_rows.empty() || right_rows.empty()) return leaf();

        int me = static_cast<int>(nodes.size());
        nodes.push_back({static_cast<int>(best_feature), best_threshold, -1, -1, mean});
        int li = build(left_rows, depth + 1);
        int ri = build(right_rows, depth + 1);
        nodes[me].left = li;
        nodes[me].right = ri;
        return me;
    }
};

} // namespace

TrainedModel train_rf(const fgm::Dataset& ds, const RFConfig& cfg) {
    if (cfg.n_trees < 1 || cfg.min_samples_leaf < 1)
        throw InvalidConfig("bad random forest configuration");
    auto p = detail::prepare(ds);
    const std::size_t n = p.x.size();
    const std::size_t m = p.y.front().size();

    TrainedModel model;
    model.family = Family::rf;
    model.scaler = p.scaler;
    model.input_names = p.input_names;
    model.target_names = p.target_names;
    model.config_echo =
        "family=rf n_trees=" + format_int(cfg.n_trees) + " max_depth=" + format_int(cfg.max_depth) +
        " min_samples_leaf=" + format_int(cfg.min_samples_leaf) +
        " feature_subsample=" + format_int(cfg.feature_subsample) +
        " bootstrap=" + (cfg.bootstrap ? std::string("1") : std::string("0")) +
        " seed=" + format_int(static_cast<long long>(cfg.seed));

    const int d = static_cast<int>(p.x.front().size());
    int split_features = cfg.feature_subsample > 0
                             ? std::min(cfg.feature_subsample, d)
                             : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(d))));

    model.forests.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
        Rng rng(cfg.seed ^ (0x9E3779B97F4A7C15ull * (t + 1)));
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = p.y[i][t];
        for (int k = 0; k < cfg.n_trees; ++k) {
            std::vector<std::size_t> rows(n);
            if (cfg.bootstrap) {
                for (std::size_t i = 0; i < n; ++i)
                    rows[i] = static_cast<std::size_t>(rng.below(n));
            } else {
                std::iota(rows.begin(), rows.end(), 0);
            }
            TreeBuilder builder{p.x, column, cfg, split_features, rng, {}};
            builder.build(rows, 0);
            Tree tree;
            tree.nodes = std::move(builder.nodes);
            model.forests[t].push_back(std::move(tree));
        }
    }
    return model;
}

} // namespace fgml::ml

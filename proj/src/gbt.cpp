#include "hpml/models/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hpml::models {

double BoostedEnsemble::predict(std::span<const double> row) const {
    if (row.size() != n_features)
        throw std::invalid_argument("gbt predict: feature count mismatch");
    double sum = 0.0;
    for (const auto& nodes : trees) sum += predict_tree(nodes, row);
    return base_score + params.learning_rate * sum;
}

namespace {

struct GbtGrower {
    const Dataset& ds;
    const std::vector<double>& gradients;
    const GbtParams& params;
    std::vector<TreeNode> nodes;

    static double score(double g, double h, double lambda) { return g * g / (h + lambda); }

    int32_t build(std::vector<size_t>& rows, int depth) {
        double g_total = 0.0;
        for (size_t r : rows) g_total += gradients[r];
        const double h_total = static_cast<double>(rows.size());

        bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;

        struct Best {
            bool found = false;
            size_t feature = 0;
            double threshold = 0.0;
            double gain = 0.0;
        } best;

        if (!depth_capped && rows.size() >= 2) {
            std::vector<std::pair<double, double>> points(rows.size());
            for (size_t f = 0; f < ds.n_features(); ++f) {
                for (size_t i = 0; i < rows.size(); ++i)
                    points[i] = {ds.rows[rows[i]][f], gradients[rows[i]]};
                std::sort(points.begin(), points.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });

                double g_left = 0.0;
                for (size_t i = 1; i < rows.size(); ++i) {
                    g_left += points[i - 1].second;
                    if (points[i].first == points[i - 1].first) continue;
                    double h_left = static_cast<double>(i);
                    double g_right = g_total - g_left;
                    double h_right = h_total - h_left;
                    double gain = 0.5 * (score(g_left, h_left, params.lambda) +
                                         score(g_right, h_right, params.lambda) -
                                         score(g_total, h_total, params.lambda)) -
                                  params.gamma;
                    if (gain > best.gain) {
                        best.found = true;
                        best.feature = f;
                        best.threshold = (points[i - 1].first + points[i].first) / 2.0;
                        best.gain = gain;
                    }
                }
            }
        }

        int32_t idx = static_cast<int32_t>(nodes.size());
        nodes.emplace_back();
        if (!best.found) {
            nodes[idx].value = -g_total / (h_total + params.lambda);
            return idx;
        }

        std::vector<size_t> left_rows, right_rows;
        for (size_t r : rows)
            (ds.rows[r][best.feature] <= best.threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        nodes[idx].feature = static_cast<int32_t>(best.feature);
        nodes[idx].threshold = best.threshold;
        int32_t left = build(left_rows, depth + 1);
        nodes[idx].left = left;
        int32_t right = build(right_rows, depth + 1);
        nodes[idx].right = right;
        return idx;
    }
};

}  // namespace

BoostedEnsemble fit_gbt(const Dataset& train, const GbtParams& params, uint64_t seed) {
    if (train.n_rows() == 0) throw std::invalid_argument("fit_gbt: empty dataset");
    train.check();

    const size_t n = train.n_rows();
    BoostedEnsemble model;
    model.params = params;
    model.seed = seed;
    model.n_features = train.n_features();
    for (double y : train.target) model.base_score += y;
    model.base_score /= static_cast<double>(n);

    std::vector<double> pred(n, model.base_score);
    std::vector<double> gradients(n, 0.0);
    Rng rng(derive_seed(seed, 0));

    const size_t sample_size =
        params.subsample < 1.0
            ? std::max<size_t>(1, static_cast<size_t>(std::nearbyint(params.subsample * n)))
            : n;

    for (int round = 0; round < params.n_rounds; ++round) {
        for (size_t i = 0; i < n; ++i) gradients[i] = pred[i] - train.target[i];

        std::vector<size_t> rows;
        if (sample_size < n) {
            rows = rng.sample_indices(n, sample_size);
            std::sort(rows.begin(), rows.end());
        } else {
            rows.resize(n);
            for (size_t i = 0; i < n; ++i) rows[i] = i;
        }

        GbtGrower grower{train, gradients, params, {}};
        grower.build(rows, 0);

        for (size_t i = 0; i < n; ++i)
            pred[i] += params.learning_rate * predict_tree(grower.nodes, train.rows[i]);
        model.trees.push_back(std::move(grower.nodes));
    }
    return model;
}

}  // namespace hpml::models

#include "hpml/models/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hpml::models {

double predict_tree(const std::vector<TreeNode>& nodes, std::span<const double> row) {
    int32_t idx = 0;
    while (!nodes[idx].is_leaf()) {
        const TreeNode& node = nodes[idx];
        idx = row[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes[idx].value;
}

double DecisionTree::predict(std::span<const double> row) const {
    if (row.size() != n_features)
        throw std::invalid_argument("tree predict: feature count mismatch");
    return predict_tree(nodes, row);
}

namespace detail {

namespace {

struct NodeStats {
    double mean = 0.0;
    double sse = 0.0;  // sum of squared deviations from the mean
};

NodeStats stats_of(const Dataset& ds, std::span<const size_t> rows) {
    NodeStats s;
    for (size_t r : rows) s.mean += ds.target[r];
    s.mean /= static_cast<double>(rows.size());
    for (size_t r : rows) {
        double d = ds.target[r] - s.mean;
        s.sse += d * d;
    }
    return s;
}

struct SplitChoice {
    bool found = false;
    size_t feature = 0;
    double threshold = 0.0;
    double reduction = 0.0;
};

// Best SSE-reduction split over the candidate features. Targets are
// centered on the node mean before the prefix sums to keep the
// subtraction well conditioned at dollar scale.
SplitChoice best_split(const Dataset& ds, std::span<const size_t> rows, const NodeStats& stats,
                       std::span<const size_t> features, size_t min_leaf) {
    SplitChoice best;
    const size_t k = rows.size();

    std::vector<std::pair<double, double>> points(k);  // (feature value, centered target)
    for (size_t f : features) {
        for (size_t i = 0; i < k; ++i)
            points[i] = {ds.rows[rows[i]][f], ds.target[rows[i]] - stats.mean};
        std::sort(points.begin(), points.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        double left_sum = 0.0, left_sq = 0.0;
        double total_sum = 0.0, total_sq = 0.0;
        for (const auto& [x, y] : points) {
            total_sum += y;
            total_sq += y * y;
        }
        for (size_t i = 1; i < k; ++i) {
            const auto& prev = points[i - 1];
            left_sum += prev.second;
            left_sq += prev.second * prev.second;
            if (points[i].first == prev.first) continue;
            if (i < min_leaf || k - i < min_leaf) continue;

            double nl = static_cast<double>(i);
            double nr = static_cast<double>(k - i);
            double sse_left = left_sq - left_sum * left_sum / nl;
            double right_sum = total_sum - left_sum;
            double sse_right = (total_sq - left_sq) - right_sum * right_sum / nr;
            double reduction = stats.sse - sse_left - sse_right;
            if (reduction > best.reduction) {
                best.found = true;
                best.feature = f;
                best.threshold = (prev.first + points[i].first) / 2.0;
                best.reduction = reduction;
            }
        }
    }
    return best;
}

struct Grower {
    const Dataset& ds;
    const TreeParams& params;
    Rng* rng;
    size_t feature_subset;
    std::vector<TreeNode> nodes;

    int32_t build(std::vector<size_t>& rows, int depth) {
        NodeStats stats = stats_of(ds, rows);

        bool stop = rows.size() < 2 * static_cast<size_t>(params.min_samples_leaf);
        if (params.max_depth > 0 && depth >= params.max_depth) stop = true;
        if (!stop && stats.mean != 0.0) {
            double cv = std::sqrt(stats.sse / static_cast<double>(rows.size())) / std::abs(stats.mean);
            if (cv < params.cv_threshold) stop = true;
        }

        SplitChoice split;
        if (!stop) {
            std::vector<size_t> features;
            if (feature_subset > 0 && feature_subset < ds.n_features()) {
                features = rng->sample_indices(ds.n_features(), feature_subset);
                std::sort(features.begin(), features.end());
            } else {
                features.resize(ds.n_features());
                for (size_t f = 0; f < features.size(); ++f) features[f] = f;
            }
            split = best_split(ds, rows, stats, features,
                               static_cast<size_t>(params.min_samples_leaf));
        }

        int32_t idx = static_cast<int32_t>(nodes.size());
        nodes.emplace_back();
        if (stop || !split.found) {
            nodes[idx].value = stats.mean;
            return idx;
        }

        std::vector<size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (size_t r : rows)
            (ds.rows[r][split.feature] <= split.threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        nodes[idx].feature = static_cast<int32_t>(split.feature);
        nodes[idx].threshold = split.threshold;
        int32_t left = build(left_rows, depth + 1);
        nodes[idx].left = left;
        int32_t right = build(right_rows, depth + 1);
        nodes[idx].right = right;
        return idx;
    }
};

}  // namespace

std::vector<TreeNode> grow_tree(const Dataset& ds, std::span<const size_t> row_indices,
                                const TreeParams& params, Rng* rng, size_t feature_subset) {
    if (row_indices.empty()) throw std::invalid_argument("grow_tree: no rows");
    if (feature_subset > 0 && feature_subset < ds.n_features() && rng == nullptr)
        throw std::invalid_argument("grow_tree: feature subsetting needs an rng");
    Grower grower{ds, params, rng, feature_subset, {}};
    std::vector<size_t> rows(row_indices.begin(), row_indices.end());
    grower.build(rows, 0);
    return std::move(grower.nodes);
}

}  // namespace detail

DecisionTree fit_tree(const Dataset& train, const TreeParams& params) {
    if (train.n_rows() == 0) throw std::invalid_argument("fit_tree: empty dataset");
    train.check();

    std::vector<size_t> rows(train.n_rows());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;

    DecisionTree tree;
    tree.params = params;
    tree.n_features = train.n_features();
    tree.nodes = detail::grow_tree(train, rows, params, nullptr, 0);
    return tree;
}

}  // namespace hpml::models

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hpml/data.hpp"
#include "hpml/models/params.hpp"
#include "hpml/rng.hpp"

namespace hpml::models {

// Internal node: feature >= 0, children set; rows with value <= threshold
// go left. Leaf: feature == -1, value = mean of its training targets.
struct TreeNode {
    int32_t feature = -1;
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

double predict_tree(const std::vector<TreeNode>& nodes, std::span<const double> row);

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    TreeParams params;
    size_t n_features = 0;

    double predict(std::span<const double> row) const;
};

// Greedy binary splitting on the largest SSE reduction. Thresholds sit at
// midpoints between consecutive distinct feature values; ties go to the
// lowest feature index, then the lowest threshold. A node becomes a leaf
// when its target CV (std/|mean|, population std) drops below
// cv_threshold, depth hits max_depth, fewer than 2*min_samples_leaf rows
// remain, or no split reduces the SSE.
DecisionTree fit_tree(const Dataset& train, const TreeParams& params);

namespace detail {

// Forest building block: grow on a row multiset, optionally restricting
// every split to a fresh random subset of features. rng may be null when
// feature_subset == 0 (all features considered).
std::vector<TreeNode> grow_tree(const Dataset& ds, std::span<const size_t> row_indices,
                                const TreeParams& params, Rng* rng, size_t feature_subset);

}  // namespace detail

}  // namespace hpml::models

#pragma once

#include <cstdint>

#include "hpml/models/tree.hpp"

namespace hpml::models {

struct RandomForest {
    std::vector<DecisionTree> trees;
    ForestParams params;        // features_per_split resolved (never 0)
    uint64_t seed = 0;
    size_t n_features = 0;

    // Arithmetic mean of the member trees' predictions.
    double predict(std::span<const double> row) const;
};

// Each tree trains on an n-sized bootstrap sample (when enabled) and
// considers a fresh uniform subset of features_per_split features at
// every split. Tree t draws from its own stream seeded with
// derive_seed(seed, t): bootstrap indices first, then split subsets in
// build order, so parallel training cannot change the result.
RandomForest fit_forest(const Dataset& train, const ForestParams& params, uint64_t seed);

}  // namespace hpml::models

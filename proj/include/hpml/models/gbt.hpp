#pragma once

#include <cstdint>

#include "hpml/models/tree.hpp"

namespace hpml::models {

struct BoostedEnsemble {
    double base_score = 0.0;  // mean of the training targets
    GbtParams params;
    std::vector<std::vector<TreeNode>> trees;  // leaf value = raw leaf weight
    uint64_t seed = 0;
    size_t n_features = 0;

    // base_score + learning_rate * sum of tree outputs.
    double predict(std::span<const double> row) const;
};

// Squared-error boosting: per round the gradients are g_i = pred_i - y_i
// with unit hessians, trees grow greedily on the gain
//   1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma
// splitting only while the gain is positive, and each leaf contributes
// -G_leaf/(H_leaf+lambda). The seed only matters when subsample < 1.
BoostedEnsemble fit_gbt(const Dataset& train, const GbtParams& params, uint64_t seed = 0);

}  // namespace hpml::models

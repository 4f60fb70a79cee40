#pragma once

#include <span>
#include <string>
#include <variant>

#include "hpml/models/forest.hpp"
#include "hpml/models/gbt.hpp"
#include "hpml/models/linear.hpp"
#include "hpml/models/svr.hpp"
#include "hpml/models/tree.hpp"

namespace hpml::models {

using Model = std::variant<LinearModel, SvrModel, DecisionTree, RandomForest, BoostedEnsemble>;

Family model_family(const Model& model);
size_t model_n_features(const Model& model);

// Validates the hyperparameters for the family, then trains. The seed only
// matters for the randomized families (forest, gbt with subsampling).
Model fit_model(Family family, const HyperParams& hp, const Dataset& train, uint64_t seed);

double predict(const Model& model, std::span<const double> row);
std::vector<double> predict_all(const Model& model, const Dataset& ds);

struct ModelIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Single JSON document {schema_version, model_kind, params, payload};
// trees are nested {feature, threshold, left, right} / {leaf} objects.
// Doubles round-trip exactly, so a reloaded model predicts bit-identically.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

}  // namespace hpml::models

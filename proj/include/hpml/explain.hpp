#pragma once

#include <span>
#include <string>
#include <vector>

#include "hpml/data.hpp"
#include "hpml/models/io.hpp"

namespace hpml::explain {

struct ShapExplanation {
    std::vector<std::string> feature_names;
    std::vector<double> phi;  // USD attribution per feature
    double base_value = 0.0;  // mean background prediction
    double prediction = 0.0;
};

struct FeaturePoint {
    double value = 0.0;  // raw feature value, kept for gradient coloring
    double phi = 0.0;
};

struct ShapSummary {
    std::vector<std::string> feature_names;
    std::vector<std::vector<FeaturePoint>> points;  // one list per feature, one entry per row
    std::vector<double> mean_abs_phi;
};

// Features the fitted model can actually read: nonzero linear coefficients,
// split features of trees/ensembles, everything for kernel models. The
// coalition walk only enumerates these; structurally ignored features get
// an exact zero.
std::vector<size_t> active_features(const models::Model& model, size_t n_features);

// Exact interventional Shapley values: v(S) averages model output over the
// background rows with features in S pinned to the explained row.
ShapExplanation exact_shap(const models::Model& model, std::span<const double> row,
                           const Dataset& background);

ShapSummary shap_summary(const models::Model& model, const Dataset& rows,
                         const Dataset& background);

// Descending mean |phi|, ties alphabetical.
std::vector<std::string> rank_importance(const ShapSummary& summary);

Dataset sample_background(const Dataset& train, size_t size, uint64_t seed);

inline constexpr const char* kShapCsvHeader = "bucket,row,feature,value,phi\n";
inline constexpr const char* kShapSummaryCsvHeader = "bucket,rank,feature,mean_abs_phi\n";

void append_shap_rows(std::string& out, const std::string& bucket, const ShapSummary& summary);
void append_summary_rows(std::string& out, const std::string& bucket, const ShapSummary& summary);

}  // namespace hpml::explain

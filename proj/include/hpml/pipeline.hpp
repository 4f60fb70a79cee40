#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hpml/data.hpp"
#include "hpml/dataset.hpp"
#include "hpml/eval.hpp"
#include "hpml/models/params.hpp"

namespace hpml::pipeline {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    uint64_t seed = 0;
    std::string out_dir = ".";
    double test_fraction = 0.2;
    int k_folds = 5;
    size_t background_size = 100;
    size_t explain_budget = 25;  // rows explained per bucket
    std::vector<models::Family> families = models::all_families();
    std::vector<dataset::YearBucket> buckets = dataset::all_buckets();
    std::map<models::Family, std::vector<models::HyperParams>> grids = eval::default_grids();
    models::Family explain_family = models::Family::gbt;
    // Boosted stumps by default: exact Shapley enumeration is exponential
    // in the features the model actually splits on, so the explained model
    // is kept shallow.
    models::HyperParams explain_params = {{"n_rounds", 40.0}, {"max_depth", 1.0}};
};

// Overlays JSON config keys (test_fraction, k_folds, background_size,
// explain_budget, families, buckets, grids, explain_family, explain_params,
// seed) onto the defaults. The --seed flag wins over the file.
void apply_config_json(RunConfig& config, const std::string& text);
void apply_config_file(RunConfig& config, const std::string& path);

// Cleaned-table CSV: "bucket" label column, then the encoded features, then
// price. The bucket column carries the sale-year partition through the
// pipeline without putting dates into the feature matrix.
struct CleanTable {
    Dataset all;
    std::vector<std::string> bucket_labels;  // per row
};
void write_clean_csv(const CleanTable& table, const std::string& path);
CleanTable read_clean_csv(const std::string& path);
std::map<dataset::YearBucket, Dataset> split_buckets(const CleanTable& table);

uint64_t fnv1a_file(const std::string& path);
void write_manifest(const std::string& command, const RunConfig& config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs);

// Commands throw on fatal errors; main maps exception types to exit codes.
void cmd_parse(const std::string& html_dir, const std::string& rules_path,
               const RunConfig& config);
void cmd_clean(const std::string& in_csv, const RunConfig& config);
void cmd_stats(const std::string& in_csv, const RunConfig& config);
void cmd_train(const std::string& clean_csv, const std::string& family_name,
               const models::HyperParams& params, const std::string& bucket_filter,
               const RunConfig& config);
void cmd_evaluate(const std::string& clean_csv, const RunConfig& config);
void cmd_explain(const std::string& clean_csv, const RunConfig& config);
void cmd_report(const std::string& results_csv, const std::string& corr_csv,
                const std::string& shap_csv, const std::string& shap_summary_csv,
                const RunConfig& config);

}  // namespace hpml::pipeline

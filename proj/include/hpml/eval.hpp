#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpml/data.hpp"
#include "hpml/dataset.hpp"
#include "hpml/models/params.hpp"

namespace hpml::eval {

using dataset::YearBucket;
using models::Family;
using models::HyperParams;

struct EvaluationPair {
    std::vector<double> predicted;
    std::vector<double> actual;

    size_t n() const { return actual.size(); }
    double mean_actual() const;
    void check() const;  // equal lengths, n >= 1
};

struct MetricSet {
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> r2;  // absent when the actuals are constant
};

double mae(const EvaluationPair& pair);
double rmse(const EvaluationPair& pair);
std::optional<double> r_squared(const EvaluationPair& pair);
MetricSet metrics(const EvaluationPair& pair);

struct Split {
    Dataset train;
    Dataset test;
};

// Seeded shuffle, then round-half-even on the train count: n 3 at fraction
// 0.5 keeps 2 training rows. Both sides end up with at least one row.
Split train_test_split(const Dataset& ds, double test_fraction, uint64_t seed);

struct GridResult {
    HyperParams params;
    double cv_rmse = 0.0;
};

// k-fold CV on the training split only; picks the lowest mean fold RMSE,
// first grid entry winning ties.
GridResult grid_search(Family family, const std::vector<HyperParams>& grid, const Dataset& train,
                       uint64_t seed, int k_folds = 5);

std::map<Family, std::vector<HyperParams>> default_grids();
std::map<Family, std::vector<HyperParams>> grids_from_json(const std::string& text);
std::map<Family, std::vector<HyperParams>> load_grids(const std::string& path);
HyperParams hyperparams_from_json(const std::string& text);

struct EvalConfig {
    double test_fraction = 0.2;
    int k_folds = 5;
    uint64_t seed = 0;
    std::vector<Family> families = models::all_families();
    std::map<Family, std::vector<HyperParams>> grids = default_grids();
};

struct EvalCell {
    Family family = Family::linear;
    YearBucket bucket = YearBucket::y2018;
    MetricSet test_metrics;
    HyperParams chosen;
    double cv_rmse = 0.0;
    size_t n_train = 0;
    size_t n_test = 0;
};

struct EvalReport {
    std::vector<EvalCell> cells;
    uint64_t seed = 0;
    double test_fraction = 0.2;
    int k_folds = 5;

    const EvalCell* find(Family family, YearBucket bucket) const;
};

EvalReport evaluate_all(const std::map<YearBucket, Dataset>& buckets, const EvalConfig& config);

std::string results_csv(const EvalReport& report);
void write_results_csv(const EvalReport& report, const std::string& path);
// Seeds, grids, and chosen parameters for reproducing the grid.
std::string eval_manifest_json(const EvalReport& report,
                               const std::map<Family, std::vector<HyperParams>>& grids);

}  // namespace hpml::eval

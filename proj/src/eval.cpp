#include "hpml/eval.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hpml/csv.hpp"
#include "hpml/models/io.hpp"
#include "hpml/rng.hpp"
#include "json.hpp"

namespace hpml::eval {

namespace {

using nlohmann::json;

json params_to_json(const HyperParams& hp) {
    json out = json::object();
    for (const auto& [key, value] : hp) {
        if (std::holds_alternative<double>(value)) {
            out[key] = std::get<double>(value);
        } else {
            out[key] = std::get<std::string>(value);
        }
    }
    return out;
}

HyperParams params_from_json(const json& obj) {
    HyperParams hp;
    for (const auto& [key, value] : obj.items()) {
        if (value.is_number()) {
            hp[key] = value.get<double>();
        } else if (value.is_string()) {
            hp[key] = value.get<std::string>();
        } else if (value.is_boolean()) {
            hp[key] = value.get<bool>() ? 1.0 : 0.0;
        } else {
            throw std::invalid_argument("grid value for " + key + " must be number or string");
        }
    }
    return hp;
}

}  // namespace

double EvaluationPair::mean_actual() const {
    double sum = std::accumulate(actual.begin(), actual.end(), 0.0);
    return sum / static_cast<double>(actual.size());
}

void EvaluationPair::check() const {
    if (predicted.size() != actual.size()) {
        throw std::invalid_argument("evaluation pair length mismatch");
    }
    if (actual.empty()) throw std::invalid_argument("evaluation pair is empty");
}

double mae(const EvaluationPair& pair) {
    pair.check();
    double sum = 0.0;
    for (size_t i = 0; i < pair.n(); ++i) sum += std::abs(pair.predicted[i] - pair.actual[i]);
    return sum / static_cast<double>(pair.n());
}

double rmse(const EvaluationPair& pair) {
    pair.check();
    double sum = 0.0;
    for (size_t i = 0; i < pair.n(); ++i) {
        double d = pair.actual[i] - pair.predicted[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(pair.n()));
}

std::optional<double> r_squared(const EvaluationPair& pair) {
    pair.check();
    double mean = pair.mean_actual();
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (size_t i = 0; i < pair.n(); ++i) {
        double r = pair.actual[i] - pair.predicted[i];
        double d = pair.actual[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0) return std::nullopt;
    return 1.0 - ss_res / ss_tot;
}

MetricSet metrics(const EvaluationPair& pair) {
    MetricSet out;
    out.mae = mae(pair);
    out.rmse = rmse(pair);
    out.r2 = r_squared(pair);
    return out;
}

Split train_test_split(const Dataset& ds, double test_fraction, uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("test_fraction must be in (0, 1)");
    }
    size_t n = ds.n_rows();
    if (n < 2) throw std::invalid_argument("train_test_split: need at least 2 rows");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    double want = std::nearbyint(static_cast<double>(n) * (1.0 - test_fraction));
    size_t n_train = static_cast<size_t>(want);
    if (n_train < 1) n_train = 1;
    if (n_train > n - 1) n_train = n - 1;

    Split split;
    split.train = ds.subset(std::span<const size_t>(order.data(), n_train));
    split.test = ds.subset(std::span<const size_t>(order.data() + n_train, n - n_train));
    return split;
}

GridResult grid_search(Family family, const std::vector<HyperParams>& grid, const Dataset& train,
                       uint64_t seed, int k_folds) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
    if (k_folds < 2) throw std::invalid_argument("grid_search: need at least 2 folds");
    size_t n = train.n_rows();
    size_t k = static_cast<size_t>(k_folds);
    if (n < k) throw std::invalid_argument("grid_search: dataset smaller than fold count");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(derive_seed(seed, 0));
    rng.shuffle(order);

    // Fold f covers order[start_f, start_{f+1}); the first n % k folds take
    // the extra row.
    std::vector<size_t> starts(k + 1, 0);
    for (size_t f = 0; f < k; ++f) {
        size_t size = n / k + (f < n % k ? 1 : 0);
        starts[f + 1] = starts[f] + size;
    }

    GridResult best;
    double best_score = 0.0;
    bool have_best = false;
    for (size_t c = 0; c < grid.size(); ++c) {
        double fold_sum = 0.0;
        for (size_t f = 0; f < k; ++f) {
            std::vector<size_t> fit_rows;
            fit_rows.reserve(n - (starts[f + 1] - starts[f]));
            for (size_t i = 0; i < n; ++i) {
                if (i < starts[f] || i >= starts[f + 1]) fit_rows.push_back(order[i]);
            }
            Dataset fold_train = train.subset(fit_rows);
            models::Model model =
                models::fit_model(family, grid[c], fold_train, derive_seed(seed, 1 + c * k + f));

            EvaluationPair pair;
            for (size_t i = starts[f]; i < starts[f + 1]; ++i) {
                pair.predicted.push_back(models::predict(model, train.rows[order[i]]));
                pair.actual.push_back(train.target[order[i]]);
            }
            fold_sum += rmse(pair);
        }
        double score = fold_sum / static_cast<double>(k);
        if (!have_best || score < best_score) {
            have_best = true;
            best_score = score;
            best.params = grid[c];
            best.cv_rmse = score;
        }
    }
    return best;
}

std::map<Family, std::vector<HyperParams>> default_grids() {
    std::map<Family, std::vector<HyperParams>> grids;
    grids[Family::linear] = {HyperParams{}};
    grids[Family::svr] = {
        HyperParams{{"kernel", std::string("linear")}},
        HyperParams{{"kernel", std::string("rbf")}},
        HyperParams{{"kernel", std::string("polynomial")}, {"degree", 2.0}},
    };
    grids[Family::tree] = {
        HyperParams{{"max_depth", 8.0}},
        HyperParams{{"max_depth", 12.0}},
        HyperParams{{"max_depth", 12.0}, {"min_samples_leaf", 2.0}},
        HyperParams{{"max_depth", 12.0}, {"cv_threshold", 0.05}},
    };
    grids[Family::forest] = {
        HyperParams{{"n_trees", 100.0}},
        HyperParams{{"n_trees", 200.0}, {"min_samples_leaf", 2.0}},
    };
    grids[Family::gbt] = {
        HyperParams{{"n_rounds", 200.0}, {"max_depth", 4.0}},
        HyperParams{{"n_rounds", 300.0}, {"max_depth", 6.0}},
    };
    return grids;
}

std::map<Family, std::vector<HyperParams>> grids_from_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw std::invalid_argument("grids file is not valid JSON");
    if (!doc.is_object()) throw std::invalid_argument("grids file must be a JSON object");
    std::map<Family, std::vector<HyperParams>> grids;
    for (const auto& [name, entries] : doc.items()) {
        std::optional<Family> family = models::family_from_name(name);
        if (!family) throw std::invalid_argument("grids file names unknown family: " + name);
        if (!entries.is_array() || entries.empty()) {
            throw std::invalid_argument("grid for " + name + " must be a non-empty array");
        }
        std::vector<HyperParams> grid;
        for (const json& entry : entries) {
            if (!entry.is_object()) {
                throw std::invalid_argument("grid entries for " + name + " must be objects");
            }
            grid.push_back(params_from_json(entry));
        }
        grids[*family] = std::move(grid);
    }
    return grids;
}

HyperParams hyperparams_from_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw std::invalid_argument("hyperparameters must be a JSON object");
    }
    return params_from_json(doc);
}

std::map<Family, std::vector<HyperParams>> load_grids(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open grids file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return grids_from_json(buf.str());
}

const EvalCell* EvalReport::find(Family family, YearBucket bucket) const {
    for (const EvalCell& cell : cells) {
        if (cell.family == family && cell.bucket == bucket) return &cell;
    }
    return nullptr;
}

EvalReport evaluate_all(const std::map<YearBucket, Dataset>& buckets, const EvalConfig& config) {
    if (buckets.empty()) throw std::invalid_argument("evaluate_all: no buckets");
    for (const auto& [bucket, ds] : buckets) {
        if (ds.n_rows() == 0) {
            throw std::invalid_argument("evaluate_all: empty bucket " +
                                        dataset::bucket_label(bucket));
        }
    }

    EvalReport report;
    report.seed = config.seed;
    report.test_fraction = config.test_fraction;
    report.k_folds = config.k_folds;

    for (Family family : config.families) {
        auto grid_it = config.grids.find(family);
        if (grid_it == config.grids.end()) {
            throw std::invalid_argument("no grid configured for family " +
                                        models::family_name(family));
        }
        for (const auto& [bucket, ds] : buckets) {
            uint64_t ib = static_cast<uint64_t>(bucket);
            uint64_t fi = static_cast<uint64_t>(family);
            Split split = train_test_split(ds, config.test_fraction, derive_seed(config.seed, ib));
            GridResult tuned = grid_search(family, grid_it->second, split.train,
                                           derive_seed(config.seed, 16 + ib * 8 + fi),
                                           config.k_folds);
            models::Model model = models::fit_model(family, tuned.params, split.train,
                                                    derive_seed(config.seed, 64 + ib * 8 + fi));

            EvaluationPair pair;
            pair.predicted = models::predict_all(model, split.test);
            pair.actual = split.test.target;

            EvalCell cell;
            cell.family = family;
            cell.bucket = bucket;
            cell.test_metrics = metrics(pair);
            cell.chosen = tuned.params;
            cell.cv_rmse = tuned.cv_rmse;
            cell.n_train = split.train.n_rows();
            cell.n_test = split.test.n_rows();
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

std::string results_csv(const EvalReport& report) {
    std::string out = "model,bucket,rmse,mae,r_squared\n";
    for (const EvalCell& cell : report.cells) {
        std::vector<std::string> row;
        row.push_back(models::family_name(cell.family));
        row.push_back(dataset::bucket_label(cell.bucket));
        row.push_back(csv::format_number(cell.test_metrics.rmse));
        row.push_back(csv::format_number(cell.test_metrics.mae));
        row.push_back(cell.test_metrics.r2 ? csv::format_number(*cell.test_metrics.r2)
                                           : std::string());
        out += csv::join_row(row);
        out += '\n';
    }
    return out;
}

void write_results_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open results file for writing: " + path);
    out << results_csv(report);
    if (!out) throw std::runtime_error("failed while writing results file: " + path);
}

std::string eval_manifest_json(const EvalReport& report,
                               const std::map<Family, std::vector<HyperParams>>& grids) {
    json doc;
    doc["seed"] = report.seed;
    doc["test_fraction"] = report.test_fraction;
    doc["k_folds"] = report.k_folds;
    json grid_obj = json::object();
    for (const auto& [family, grid] : grids) {
        json entries = json::array();
        for (const HyperParams& hp : grid) entries.push_back(params_to_json(hp));
        grid_obj[models::family_name(family)] = std::move(entries);
    }
    doc["grids"] = std::move(grid_obj);
    json cells = json::array();
    for (const EvalCell& cell : report.cells) {
        json c;
        c["model"] = models::family_name(cell.family);
        c["bucket"] = dataset::bucket_label(cell.bucket);
        c["chosen_params"] = params_to_json(cell.chosen);
        c["cv_rmse"] = cell.cv_rmse;
        c["n_train"] = cell.n_train;
        c["n_test"] = cell.n_test;
        c["rmse"] = cell.test_metrics.rmse;
        c["mae"] = cell.test_metrics.mae;
        if (cell.test_metrics.r2) {
            c["r_squared"] = *cell.test_metrics.r2;
        } else {
            c["r_squared"] = nullptr;
        }
        cells.push_back(std::move(c));
    }
    doc["cells"] = std::move(cells);
    return doc.dump(2) + "\n";
}

}  // namespace hpml::eval

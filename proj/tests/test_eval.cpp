#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "hpml/eval.hpp"
#include "json.hpp"

using namespace hpml;
using namespace hpml::eval;
using dataset::YearBucket;
using models::Family;

TEST_CASE("mae, rmse and r_squared match worked examples") {
    EvaluationPair pair;
    pair.predicted = {110, 190};
    pair.actual = {100, 200};
    CHECK(mae(pair) == 10.0);

    EvaluationPair res;
    res.predicted = {-3, 4};
    res.actual = {0, 0};  // residuals {3, -4}
    CHECK(rmse(res) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));

    EvaluationPair r2;
    r2.actual = {1, 2, 3};
    r2.predicted = {1, 2, 5};
    REQUIRE(r_squared(r2).has_value());
    CHECK(*r_squared(r2) == doctest::Approx(-1.0).epsilon(1e-15));

    EvaluationPair perfect;
    perfect.actual = {1, 2, 3};
    perfect.predicted = {1, 2, 3};
    CHECK(*r_squared(perfect) == 1.0);

    EvaluationPair constant;
    constant.actual = {5, 5, 5};
    constant.predicted = {4, 5, 6};
    CHECK_FALSE(r_squared(constant).has_value());
    CHECK(mae(constant) == doctest::Approx(2.0 / 3.0));

    MetricSet ms = metrics(constant);
    CHECK_FALSE(ms.r2.has_value());
    CHECK(ms.rmse >= ms.mae);
}

TEST_CASE("metrics agree with a long-double brute-force oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = 1 + rng.index(50);
        EvaluationPair pair;
        for (size_t i = 0; i < n; ++i) {
            pair.actual.push_back((rng.next_double() * 2 - 1) * 1e6);
            pair.predicted.push_back((rng.next_double() * 2 - 1) * 1e6);
        }
        long double abs_sum = 0, sq_sum = 0, mean = 0;
        for (size_t i = 0; i < n; ++i) mean += pair.actual[i];
        mean /= n;
        long double ss_tot = 0;
        for (size_t i = 0; i < n; ++i) {
            long double r = (long double)pair.actual[i] - pair.predicted[i];
            abs_sum += std::abs((double)r);
            sq_sum += r * r;
            ss_tot += ((long double)pair.actual[i] - mean) * ((long double)pair.actual[i] - mean);
        }
        double mae_oracle = double(abs_sum / n);
        double rmse_oracle = std::sqrt(double(sq_sum / n));

        CHECK(mae(pair) == doctest::Approx(mae_oracle).epsilon(1e-9));
        CHECK(rmse(pair) == doctest::Approx(rmse_oracle).epsilon(1e-9));
        CHECK(rmse(pair) >= mae(pair) - 1e-12);
        if (ss_tot != 0) {
            double r2_oracle = double(1.0L - sq_sum / ss_tot);
            CHECK(*r_squared(pair) == doctest::Approx(r2_oracle).epsilon(1e-9));
            CHECK(*r_squared(pair) <= 1.0);
        }
    }
}

TEST_CASE("metrics are translation invariant and scale predictably") {
    Rng rng(7);
    EvaluationPair pair;
    for (int i = 0; i < 40; ++i) {
        pair.actual.push_back(rng.next_double() * 100);
        pair.predicted.push_back(rng.next_double() * 100);
    }
    EvaluationPair shifted = pair;
    for (double& v : shifted.actual) v += 12345.0;
    for (double& v : shifted.predicted) v += 12345.0;
    CHECK(mae(shifted) == doctest::Approx(mae(pair)).epsilon(1e-12));
    CHECK(rmse(shifted) == doctest::Approx(rmse(pair)).epsilon(1e-12));
    CHECK(*r_squared(shifted) == doctest::Approx(*r_squared(pair)).epsilon(1e-9));

    EvaluationPair scaled = pair;
    for (double& v : scaled.actual) v *= -3.0;
    for (double& v : scaled.predicted) v *= -3.0;
    CHECK(mae(scaled) == doctest::Approx(3.0 * mae(pair)).epsilon(1e-12));
    CHECK(rmse(scaled) == doctest::Approx(3.0 * rmse(pair)).epsilon(1e-12));
    CHECK(*r_squared(scaled) == doctest::Approx(*r_squared(pair)).epsilon(1e-9));
}

TEST_CASE("evaluation pairs validate their shape") {
    EvaluationPair bad;
    bad.predicted = {1.0};
    CHECK_THROWS_AS(mae(bad), std::invalid_argument);
    EvaluationPair empty;
    CHECK_THROWS_AS(rmse(empty), std::invalid_argument);
}

TEST_CASE("train_test_split partitions the rows") {
    Dataset ds = test_helpers::random_dataset(10, 2, 3);
    Split split = train_test_split(ds, 0.2, 7);
    CHECK(split.train.n_rows() == 8);
    CHECK(split.test.n_rows() == 2);
    CHECK(split.train.feature_names == ds.feature_names);

    std::multiset<double> original(ds.target.begin(), ds.target.end());
    std::multiset<double> pieces(split.train.target.begin(), split.train.target.end());
    pieces.insert(split.test.target.begin(), split.test.target.end());
    CHECK(pieces == original);

    Split again = train_test_split(ds, 0.2, 7);
    CHECK(again.train.rows == split.train.rows);
    CHECK(again.test.rows == split.test.rows);
}

TEST_CASE("train counts round half to even and keep both sides non-empty") {
    Dataset d3 = test_helpers::random_dataset(3, 1, 1);
    Split s3 = train_test_split(d3, 0.5, 1);
    CHECK(s3.train.n_rows() == 2);  // 1.5 rounds to 2
    CHECK(s3.test.n_rows() == 1);

    Dataset d5 = test_helpers::random_dataset(5, 1, 1);
    Split s5 = train_test_split(d5, 0.5, 1);
    CHECK(s5.train.n_rows() == 2);  // 2.5 rounds to 2
    CHECK(s5.test.n_rows() == 3);

    Dataset d2 = test_helpers::random_dataset(2, 1, 1);
    Split s2 = train_test_split(d2, 0.9, 1);
    CHECK(s2.train.n_rows() == 1);
    CHECK(s2.test.n_rows() == 1);

    CHECK_THROWS_AS(train_test_split(d3, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(train_test_split(d3, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(train_test_split(test_helpers::random_dataset(1, 1, 1), 0.5, 1),
                    std::invalid_argument);
}

TEST_CASE("grid_search returns the only candidate with a finite score") {
    Dataset ds = test_helpers::random_dataset(30, 3, 5);
    GridResult res = grid_search(Family::linear, {HyperParams{}}, ds, 11);
    CHECK(res.params.empty());
    CHECK(res.cv_rmse >= 0.0);
    CHECK(std::isfinite(res.cv_rmse));
}

TEST_CASE("grid_search prefers the clearly better depth") {
    Dataset ds = test_helpers::random_dataset(100, 3, 9);
    std::vector<HyperParams> grid = {
        {{"max_depth", 1.0}, {"cv_threshold", 0.0}, {"min_samples_leaf", 1.0}},
        {{"max_depth", 8.0}, {"cv_threshold", 0.0}, {"min_samples_leaf", 1.0}},
    };
    GridResult res = grid_search(Family::tree, grid, ds, 3);
    CHECK(std::get<double>(res.params.at("max_depth")) == 8.0);
}

TEST_CASE("grid_search ties keep the earliest entry") {
    Dataset ds = test_helpers::random_dataset(40, 2, 13);
    // The second entry only spells out the default cv_threshold, so both
    // candidates train identical trees and tie exactly.
    std::vector<HyperParams> grid = {
        {{"max_depth", 4.0}},
        {{"max_depth", 4.0}, {"cv_threshold", 0.10}},
    };
    GridResult res = grid_search(Family::tree, grid, ds, 21);
    CHECK(res.params.count("cv_threshold") == 0);
}

TEST_CASE("grid_search rejects undersized datasets and bad arguments") {
    Dataset tiny = test_helpers::random_dataset(3, 2, 1);
    CHECK_THROWS_AS(grid_search(Family::linear, {HyperParams{}}, tiny, 1, 5),
                    std::invalid_argument);
    Dataset ds = test_helpers::random_dataset(20, 2, 1);
    CHECK_THROWS_AS(grid_search(Family::linear, {}, ds, 1), std::invalid_argument);
    CHECK_THROWS_AS(grid_search(Family::linear, {HyperParams{}}, ds, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("grid_search is deterministic in the seed") {
    Dataset ds = test_helpers::random_dataset(60, 3, 31);
    std::vector<HyperParams> grid = {{{"n_trees", 10.0}}, {{"n_trees", 20.0}}};
    GridResult a = grid_search(Family::forest, grid, ds, 17);
    GridResult b = grid_search(Family::forest, grid, ds, 17);
    CHECK(a.cv_rmse == b.cv_rmse);
    CHECK(a.params == b.params);
}

TEST_CASE("default_grids covers every family with non-empty grids") {
    auto grids = default_grids();
    for (Family f : models::all_families()) {
        REQUIRE(grids.count(f) == 1);
        CHECK(!grids.at(f).empty());
    }
}

TEST_CASE("shipped grids file mirrors the built-in defaults") {
    auto shipped = load_grids(std::string(HPML_CONFIG_DIR) + "/default_grids.json");
    CHECK(shipped == default_grids());
}

TEST_CASE("grids_from_json parses and validates") {
    auto grids = grids_from_json(R"({"tree": [{"max_depth": 4}], "svr": [{"kernel": "rbf"}]})");
    CHECK(grids.size() == 2);
    CHECK(std::get<double>(grids.at(Family::tree)[0].at("max_depth")) == 4.0);
    CHECK(std::get<std::string>(grids.at(Family::svr)[0].at("kernel")) == "rbf");

    CHECK_THROWS_WITH_AS(grids_from_json(R"({"boosted": []})"),
                         doctest::Contains("unknown family"), std::invalid_argument);
    CHECK_THROWS_AS(grids_from_json(R"({"tree": []})"), std::invalid_argument);
    CHECK_THROWS_AS(grids_from_json("not json"), std::invalid_argument);
    CHECK_THROWS_AS(grids_from_json(R"({"tree": [3]})"), std::invalid_argument);

    HyperParams hp = hyperparams_from_json(R"({"max_depth": 6, "kernel": "rbf"})");
    CHECK(std::get<double>(hp.at("max_depth")) == 6.0);
}

TEST_CASE("evaluate_all fills one cell per family and bucket") {
    std::map<YearBucket, Dataset> buckets;
    buckets[YearBucket::y2018] = test_helpers::random_dataset(40, 3, 100);
    buckets[YearBucket::y2020] = test_helpers::random_dataset(50, 3, 200);

    EvalConfig config;
    config.seed = 5;
    config.families = {Family::linear, Family::tree};

    EvalReport report = evaluate_all(buckets, config);
    REQUIRE(report.cells.size() == 4);
    CHECK(report.cells[0].family == Family::linear);
    CHECK(report.cells[1].family == Family::linear);
    CHECK(report.cells[2].family == Family::tree);
    CHECK(report.cells[0].bucket == YearBucket::y2018);
    CHECK(report.cells[1].bucket == YearBucket::y2020);

    for (const EvalCell& cell : report.cells) {
        size_t n = buckets.at(cell.bucket).n_rows();
        CHECK(cell.n_train + cell.n_test == n);
        CHECK(cell.test_metrics.rmse >= cell.test_metrics.mae);
        CHECK(cell.test_metrics.r2.has_value());
    }

    const EvalCell* found = report.find(Family::tree, YearBucket::y2020);
    REQUIRE(found != nullptr);
    CHECK(found->n_test == 10);
    CHECK(report.find(Family::svr, YearBucket::y2018) == nullptr);
}

TEST_CASE("evaluate_all gives r squared 1 on a noiseless linear bucket") {
    Rng rng(50);
    Dataset ds;
    ds.feature_names = {"a", "b"};
    for (int i = 0; i < 60; ++i) {
        double a = rng.next_double() * 10, b = rng.next_double() * 10;
        ds.rows.push_back({a, b});
        ds.target.push_back(3.0 * a - 2.0 * b + 7.0);
    }
    std::map<YearBucket, Dataset> buckets;
    buckets[YearBucket::y2019] = ds;

    EvalConfig config;
    config.families = {Family::linear};
    EvalReport report = evaluate_all(buckets, config);
    REQUIRE(report.cells.size() == 1);
    REQUIRE(report.cells[0].test_metrics.r2.has_value());
    CHECK(*report.cells[0].test_metrics.r2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("evaluate_all output is deterministic") {
    std::map<YearBucket, Dataset> buckets;
    buckets[YearBucket::y2018] = test_helpers::random_dataset(45, 3, 300);

    EvalConfig config;
    config.seed = 99;
    config.families = {Family::linear, Family::gbt};
    config.grids[Family::gbt] = {{{"n_rounds", 20.0}, {"max_depth", 3.0}}};

    std::string a = results_csv(evaluate_all(buckets, config));
    std::string b = results_csv(evaluate_all(buckets, config));
    CHECK(a == b);
    CHECK(a.find("model,bucket,rmse,mae,r_squared\n") == 0);
    CHECK(a.find("linear,2018,") != std::string::npos);
    CHECK(a.find("gbt,2018,") != std::string::npos);
}

TEST_CASE("evaluate_all validates buckets and grids") {
    std::map<YearBucket, Dataset> empty_bucket;
    empty_bucket[YearBucket::y2018] = Dataset{};
    EvalConfig config;
    CHECK_THROWS_WITH_AS(evaluate_all(empty_bucket, config), doctest::Contains("2018"),
                         std::invalid_argument);
    CHECK_THROWS_AS(evaluate_all({}, config), std::invalid_argument);

    std::map<YearBucket, Dataset> buckets;
    buckets[YearBucket::y2018] = test_helpers::random_dataset(30, 2, 1);
    config.grids.erase(Family::svr);
    CHECK_THROWS_WITH_AS(evaluate_all(buckets, config), doctest::Contains("svr"),
                         std::invalid_argument);
}

TEST_CASE("results_csv leaves undefined r squared empty") {
    EvalReport report;
    EvalCell cell;
    cell.family = Family::linear;
    cell.bucket = YearBucket::y2021_22;
    cell.test_metrics.mae = 10.0;
    cell.test_metrics.rmse = 12.5;
    cell.test_metrics.r2 = std::nullopt;
    report.cells.push_back(cell);
    CHECK(results_csv(report) == "model,bucket,rmse,mae,r_squared\nlinear,2021-22,12.5,10,\n");
}

TEST_CASE("eval manifest records seeds, grids and chosen params") {
    std::map<YearBucket, Dataset> buckets;
    buckets[YearBucket::y2019] = test_helpers::random_dataset(40, 2, 9);
    EvalConfig config;
    config.seed = 31;
    config.families = {Family::tree};
    EvalReport report = evaluate_all(buckets, config);

    std::string text = eval_manifest_json(report, config.grids);
    nlohmann::json doc = nlohmann::json::parse(text);
    CHECK(doc["seed"] == 31);
    CHECK(doc["k_folds"] == 5);
    CHECK(doc["grids"]["tree"].is_array());
    REQUIRE(doc["cells"].size() == 1);
    CHECK(doc["cells"][0]["model"] == "tree");
    CHECK(doc["cells"][0]["bucket"] == "2019");
    CHECK(doc["cells"][0]["n_train"] == 32);
    CHECK(doc["cells"][0]["chosen_params"].is_object());
}

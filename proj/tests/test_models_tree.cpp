#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "hpml/models/tree.hpp"
#include "oracle_split.hpp"

using namespace hpml;
using namespace hpml::models;
using oracle_split::oracle_best_split;
using oracle_split::OracleSplit;

namespace {

void collect_leaf_sizes(const Dataset& ds, const DecisionTree& tree, std::vector<size_t>& sizes) {
    std::vector<size_t> counts(tree.nodes.size(), 0);
    for (const auto& row : ds.rows) {
        int32_t idx = 0;
        ++counts[0];
        while (!tree.nodes[idx].is_leaf()) {
            idx = row[tree.nodes[idx].feature] <= tree.nodes[idx].threshold
                      ? tree.nodes[idx].left
                      : tree.nodes[idx].right;
            ++counts[idx];
        }
    }
    for (size_t i = 0; i < tree.nodes.size(); ++i)
        if (tree.nodes[i].is_leaf()) sizes.push_back(counts[i]);
}

}  // namespace

TEST_CASE("root split agrees with the exhaustive oracle on random data") {
    for (uint64_t seed = 1; seed <= 50; ++seed) {
        Rng rng(seed);
        size_t rows = 20 + rng.index(181);   // up to 200
        size_t cols = 1 + rng.index(5);      // up to 5
        Dataset ds = test_helpers::random_dataset(rows, cols, seed * 977 + 3);

        TreeParams params;
        params.cv_threshold = 0.0;
        params.max_depth = 1;
        params.min_samples_leaf = 1 + int(rng.index(8));
        DecisionTree tree = fit_tree(ds, params);

        OracleSplit oracle = oracle_best_split(ds, size_t(params.min_samples_leaf));
        INFO("seed ", seed, " rows ", rows, " cols ", cols, " min_leaf ",
             params.min_samples_leaf);
        if (rows < 2 * size_t(params.min_samples_leaf)) {
            CHECK(tree.nodes.size() == 1);
            continue;
        }
        REQUIRE(oracle.found);
        REQUIRE(tree.nodes.size() == 3);
        CHECK(size_t(tree.nodes[0].feature) == oracle.feature);
        CHECK(tree.nodes[0].threshold == doctest::Approx(oracle.threshold).epsilon(1e-12));
    }
}

TEST_CASE("split ties break to the lowest feature then lowest threshold") {
    Dataset ds;
    ds.feature_names = {"a", "b"};
    // Feature b mirrors feature a, so every split exists on both; the
    // winning reduction appears first on feature a at its lowest midpoint.
    ds.rows = {{1, 1}, {2, 2}, {3, 3}, {4, 4}};
    ds.target = {0, 0, 10, 10};
    TreeParams params;
    params.cv_threshold = 0.0;
    params.max_depth = 1;
    params.min_samples_leaf = 1;
    DecisionTree tree = fit_tree(ds, params);
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == 2.5);

    // Symmetric target: cutting off either end gives the same reduction,
    // so the scan keeps the first (lowest) threshold.
    Dataset sym;
    sym.feature_names = {"a"};
    sym.rows = {{1}, {2}, {3}, {4}};
    sym.target = {0, 10, 10, 0};
    DecisionTree sym_tree = fit_tree(sym, params);
    CHECK(sym_tree.nodes[0].feature == 0);
    CHECK(sym_tree.nodes[0].threshold == 1.5);
}

TEST_CASE("leaves predict the mean of their training rows") {
    Dataset ds;
    ds.feature_names = {"x"};
    ds.rows = {{1}, {2}, {3}, {10}, {11}, {12}};
    ds.target = {4, 5, 6, 40, 50, 60};
    TreeParams params;
    params.cv_threshold = 0.0;
    params.max_depth = 1;
    params.min_samples_leaf = 3;
    DecisionTree tree = fit_tree(ds, params);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].threshold == 6.5);
    CHECK(tree.predict(std::vector<double>{2.0}) == doctest::Approx(5.0));
    CHECK(tree.predict(std::vector<double>{11.0}) == doctest::Approx(50.0));
}

TEST_CASE("min_samples_leaf bounds every leaf") {
    Dataset ds = test_helpers::random_dataset(97, 3, 5);
    TreeParams params;
    params.cv_threshold = 0.0;
    params.max_depth = 0;
    params.min_samples_leaf = 7;
    DecisionTree tree = fit_tree(ds, params);
    std::vector<size_t> sizes;
    collect_leaf_sizes(ds, tree, sizes);
    REQUIRE(!sizes.empty());
    for (size_t s : sizes) CHECK(s >= 7);
}

TEST_CASE("max_depth caps the tree and zero means unlimited") {
    Dataset ds = test_helpers::random_dataset(200, 4, 8);
    TreeParams capped;
    capped.cv_threshold = 0.0;
    capped.max_depth = 2;
    capped.min_samples_leaf = 1;
    DecisionTree tree = fit_tree(ds, capped);
    CHECK(tree.nodes.size() <= 7);

    TreeParams open = capped;
    open.max_depth = 0;
    open.min_samples_leaf = 1;
    DecisionTree deep = fit_tree(ds, open);
    // Unlimited depth with distinct targets drives every leaf to a single row.
    for (size_t i = 0; i < ds.n_rows(); ++i)
        CHECK(deep.predict(ds.rows[i]) == doctest::Approx(ds.target[i]).epsilon(1e-12));
}

TEST_CASE("low relative spread stops splitting via the cv rule") {
    Dataset ds;
    ds.feature_names = {"x"};
    for (int i = 0; i < 20; ++i) {
        ds.rows.push_back({double(i)});
        ds.target.push_back(1000.0 + (i % 2));  // cv well under 5%
    }
    TreeParams params;
    params.cv_threshold = 0.05;
    params.max_depth = 0;
    params.min_samples_leaf = 1;
    DecisionTree tree = fit_tree(ds, params);
    CHECK(tree.nodes.size() == 1);

    // Same shape around a zero mean must not trigger the cv stop.
    Dataset zero = ds;
    for (size_t i = 0; i < zero.target.size(); ++i) zero.target[i] = (i % 2) ? 0.5 : -0.5;
    DecisionTree split_tree = fit_tree(zero, params);
    CHECK(split_tree.nodes.size() > 1);
}

TEST_CASE("constant features leave nothing to split on") {
    Dataset ds;
    ds.feature_names = {"x"};
    ds.rows = {{3}, {3}, {3}, {3}};
    ds.target = {1, 2, 3, 4};
    TreeParams params;
    params.cv_threshold = 0.0;
    params.min_samples_leaf = 1;
    DecisionTree tree = fit_tree(ds, params);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].value == doctest::Approx(2.5));
}

TEST_CASE("fit_tree is deterministic") {
    Dataset ds = test_helpers::random_dataset(150, 5, 44);
    TreeParams params;
    DecisionTree a = fit_tree(ds, params);
    DecisionTree b = fit_tree(ds, params);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].feature == b.nodes[i].feature);
        CHECK(a.nodes[i].threshold == b.nodes[i].threshold);
        CHECK(a.nodes[i].value == b.nodes[i].value);
    }
}

TEST_CASE("fit_tree rejects empty datasets") {
    CHECK_THROWS_AS(fit_tree(Dataset{}, TreeParams{}), std::invalid_argument);
}

#include "hpml/models/forest.hpp"

#include <future>
#include <stdexcept>
#include <thread>

namespace hpml::models {

double RandomForest::predict(std::span<const double> row) const {
    if (row.size() != n_features)
        throw std::invalid_argument("forest predict: feature count mismatch");
    double sum = 0.0;
    for (const auto& tree : trees) sum += predict_tree(tree.nodes, row);
    return sum / static_cast<double>(trees.size());
}

RandomForest fit_forest(const Dataset& train, const ForestParams& params, uint64_t seed) {
    if (train.n_rows() == 0) throw std::invalid_argument("fit_forest: empty dataset");
    train.check();
    if (params.n_trees < 1) throw ParamError("n_trees must be >= 1");

    const size_t m = train.n_features();
    size_t per_split = params.features_per_split == 0
                           ? (m + 2) / 3  // ceil(M/3)
                           : static_cast<size_t>(params.features_per_split);
    if (per_split > m) throw ParamError("features_per_split exceeds the feature count");

    RandomForest forest;
    forest.params = params;
    forest.params.features_per_split = static_cast<int>(per_split);
    forest.seed = seed;
    forest.n_features = m;
    forest.trees.resize(params.n_trees);

    const size_t n = train.n_rows();
    auto fit_one = [&](size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<size_t> rows(n);
        if (params.bootstrap) {
            for (size_t i = 0; i < n; ++i) rows[i] = rng.index(n);
        } else {
            for (size_t i = 0; i < n; ++i) rows[i] = i;
        }
        DecisionTree tree;
        tree.params = params.tree;
        tree.n_features = m;
        tree.nodes = detail::grow_tree(train, rows, params.tree, &rng,
                                       per_split < m ? per_split : 0);
        forest.trees[t] = std::move(tree);
    };

    size_t workers = std::min<size_t>(std::thread::hardware_concurrency(),
                                      static_cast<size_t>(params.n_trees));
    if (workers <= 1 || params.n_trees < 4) {
        for (size_t t = 0; t < forest.trees.size(); ++t) fit_one(t);
    } else {
        std::vector<std::future<void>> tasks;
        for (size_t w = 0; w < workers; ++w) {
            tasks.push_back(std::async(std::launch::async, [&, w] {
                for (size_t t = w; t < forest.trees.size(); t += workers) fit_one(t);
            }));
        }
        for (auto& task : tasks) task.get();
    }
    return forest;
}

}  // namespace hpml::models

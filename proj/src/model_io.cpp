#include "hpml/models/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hpml::models {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

json node_to_json(const std::vector<TreeNode>& nodes, int idx) {
    const TreeNode& node = nodes[static_cast<size_t>(idx)];
    if (node.is_leaf()) {
        return json{{"leaf", node.value}};
    }
    json out;
    out["feature"] = node.feature;
    out["threshold"] = node.threshold;
    out["left"] = node_to_json(nodes, node.left);
    out["right"] = node_to_json(nodes, node.right);
    return out;
}

int node_from_json(const json& obj, std::vector<TreeNode>& nodes) {
    int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (obj.contains("leaf")) {
        nodes[static_cast<size_t>(idx)].value = obj.at("leaf").get<double>();
        return idx;
    }
    int feature = obj.at("feature").get<int>();
    double threshold = obj.at("threshold").get<double>();
    int left = node_from_json(obj.at("left"), nodes);
    int right = node_from_json(obj.at("right"), nodes);
    TreeNode& node = nodes[static_cast<size_t>(idx)];
    node.feature = feature;
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    return idx;
}

json tree_params_json(const TreeParams& p) {
    return json{{"cv_threshold", p.cv_threshold},
                {"max_depth", p.max_depth},
                {"min_samples_leaf", p.min_samples_leaf}};
}

TreeParams tree_params_from_json(const json& obj) {
    TreeParams p;
    p.cv_threshold = obj.at("cv_threshold").get<double>();
    p.max_depth = obj.at("max_depth").get<int>();
    p.min_samples_leaf = obj.at("min_samples_leaf").get<int>();
    return p;
}

struct Writer {
    json params;
    json payload;
    std::string kind;

    void operator()(const LinearModel& m) {
        kind = "linear";
        params = json::object();
        payload["coefficients"] = m.coefficients;
        payload["intercept"] = m.intercept;
    }

    void operator()(const SvrModel& m) {
        kind = "svr";
        params["kernel"] = kernel_name(m.kernel.type);
        params["C"] = m.C;
        params["epsilon"] = m.epsilon;
        params["gamma"] = m.kernel.gamma;
        params["degree"] = m.kernel.degree;
        params["coef0"] = m.kernel.coef0;
        payload["support_rows"] = m.support_rows;
        payload["dual_coefficients"] = m.dual_coefficients;
        payload["support_indices"] = m.support_indices;
        payload["intercept"] = m.intercept;
        payload["converged"] = m.converged;
        payload["feature_mean"] = m.feature_mean;
        payload["feature_std"] = m.feature_std;
        payload["target_mean"] = m.target_mean;
        payload["target_std"] = m.target_std;
        payload["n_features"] = m.n_features;
    }

    void operator()(const DecisionTree& m) {
        kind = "tree";
        params = tree_params_json(m.params);
        payload["n_features"] = m.n_features;
        payload["root"] = node_to_json(m.nodes, 0);
    }

    void operator()(const RandomForest& m) {
        kind = "forest";
        params = tree_params_json(m.params.tree);
        params["n_trees"] = m.params.n_trees;
        params["features_per_split"] = m.params.features_per_split;
        params["bootstrap"] = m.params.bootstrap;
        payload["n_features"] = m.n_features;
        payload["seed"] = m.seed;
        json trees = json::array();
        for (const DecisionTree& tree : m.trees) trees.push_back(node_to_json(tree.nodes, 0));
        payload["trees"] = std::move(trees);
    }

    void operator()(const BoostedEnsemble& m) {
        kind = "gbt";
        params["n_rounds"] = m.params.n_rounds;
        params["learning_rate"] = m.params.learning_rate;
        params["lambda"] = m.params.lambda;
        params["gamma"] = m.params.gamma;
        params["max_depth"] = m.params.max_depth;
        params["subsample"] = m.params.subsample;
        payload["n_features"] = m.n_features;
        payload["seed"] = m.seed;
        payload["base_score"] = m.base_score;
        json trees = json::array();
        for (const std::vector<TreeNode>& nodes : m.trees) trees.push_back(node_to_json(nodes, 0));
        payload["trees"] = std::move(trees);
    }
};

LinearModel read_linear(const json& payload) {
    LinearModel m;
    m.coefficients = payload.at("coefficients").get<std::vector<double>>();
    m.intercept = payload.at("intercept").get<double>();
    return m;
}

SvrModel read_svr(const json& params, const json& payload) {
    SvrModel m;
    std::string kernel = params.at("kernel").get<std::string>();
    std::optional<KernelType> type = kernel_from_name(kernel);
    if (!type) throw ModelIoError("unknown kernel in model file: " + kernel);
    m.kernel.type = *type;
    m.kernel.gamma = params.at("gamma").get<double>();
    m.kernel.degree = params.at("degree").get<int>();
    m.kernel.coef0 = params.at("coef0").get<double>();
    m.C = params.at("C").get<double>();
    m.epsilon = params.at("epsilon").get<double>();
    m.support_rows = payload.at("support_rows").get<std::vector<std::vector<double>>>();
    m.dual_coefficients = payload.at("dual_coefficients").get<std::vector<double>>();
    m.support_indices = payload.at("support_indices").get<std::vector<size_t>>();
    m.intercept = payload.at("intercept").get<double>();
    m.converged = payload.at("converged").get<bool>();
    m.feature_mean = payload.at("feature_mean").get<std::vector<double>>();
    m.feature_std = payload.at("feature_std").get<std::vector<double>>();
    m.target_mean = payload.at("target_mean").get<double>();
    m.target_std = payload.at("target_std").get<double>();
    m.n_features = payload.at("n_features").get<size_t>();
    return m;
}

DecisionTree read_tree(const json& params, const json& payload) {
    DecisionTree m;
    m.params = tree_params_from_json(params);
    m.n_features = payload.at("n_features").get<size_t>();
    node_from_json(payload.at("root"), m.nodes);
    return m;
}

RandomForest read_forest(const json& params, const json& payload) {
    RandomForest m;
    m.params.tree = tree_params_from_json(params);
    m.params.n_trees = params.at("n_trees").get<int>();
    m.params.features_per_split = params.at("features_per_split").get<int>();
    m.params.bootstrap = params.at("bootstrap").get<bool>();
    m.n_features = payload.at("n_features").get<size_t>();
    m.seed = payload.at("seed").get<uint64_t>();
    for (const json& root : payload.at("trees")) {
        DecisionTree tree;
        tree.params = m.params.tree;
        tree.n_features = m.n_features;
        node_from_json(root, tree.nodes);
        m.trees.push_back(std::move(tree));
    }
    return m;
}

BoostedEnsemble read_gbt(const json& params, const json& payload) {
    BoostedEnsemble m;
    m.params.n_rounds = params.at("n_rounds").get<int>();
    m.params.learning_rate = params.at("learning_rate").get<double>();
    m.params.lambda = params.at("lambda").get<double>();
    m.params.gamma = params.at("gamma").get<double>();
    m.params.max_depth = params.at("max_depth").get<int>();
    m.params.subsample = params.at("subsample").get<double>();
    m.n_features = payload.at("n_features").get<size_t>();
    m.seed = payload.at("seed").get<uint64_t>();
    m.base_score = payload.at("base_score").get<double>();
    for (const json& root : payload.at("trees")) {
        std::vector<TreeNode> nodes;
        node_from_json(root, nodes);
        m.trees.push_back(std::move(nodes));
    }
    return m;
}

}  // namespace

Model fit_model(Family family, const HyperParams& hp, const Dataset& train, uint64_t seed) {
    switch (family) {
        case Family::linear:
            check_params(family, hp);
            return fit_linear(train);
        case Family::svr:
            return fit_svr(train, svr_params_from(hp));
        case Family::tree:
            return fit_tree(train, tree_params_from(hp));
        case Family::forest:
            return fit_forest(train, forest_params_from(hp), seed);
        case Family::gbt:
            return fit_gbt(train, gbt_params_from(hp), seed);
    }
    throw ParamError("unknown model family");
}

Family model_family(const Model& model) {
    switch (model.index()) {
        case 0: return Family::linear;
        case 1: return Family::svr;
        case 2: return Family::tree;
        case 3: return Family::forest;
        default: return Family::gbt;
    }
}

size_t model_n_features(const Model& model) {
    return std::visit(
        [](const auto& m) -> size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel>) {
                return m.coefficients.size();
            } else {
                return m.n_features;
            }
        },
        model);
}

double predict(const Model& model, std::span<const double> row) {
    return std::visit([&](const auto& m) { return m.predict(row); }, model);
}

std::vector<double> predict_all(const Model& model, const Dataset& ds) {
    std::vector<double> out;
    out.reserve(ds.n_rows());
    for (const std::vector<double>& row : ds.rows) {
        out.push_back(predict(model, row));
    }
    return out;
}

std::string model_to_json(const Model& model) {
    Writer writer;
    writer.payload = json::object();
    std::visit(writer, model);
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["model_kind"] = writer.kind;
    doc["params"] = std::move(writer.params);
    doc["payload"] = std::move(writer.payload);
    return doc.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        throw ModelIoError("model file is not valid JSON (truncated or corrupt)");
    }
    if (!doc.is_object() || !doc.contains("schema_version") || !doc.contains("model_kind") ||
        !doc.contains("params") || !doc.contains("payload")) {
        throw ModelIoError("model file is missing required top-level keys");
    }
    int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
        throw ModelIoError("unsupported model schema_version: " + std::to_string(version));
    }
    std::string kind = doc.at("model_kind").get<std::string>();
    const json& params = doc.at("params");
    const json& payload = doc.at("payload");
    try {
        if (kind == "linear") return read_linear(payload);
        if (kind == "svr") return read_svr(params, payload);
        if (kind == "tree") return read_tree(params, payload);
        if (kind == "forest") return read_forest(params, payload);
        if (kind == "gbt") return read_gbt(params, payload);
    } catch (const json::exception& e) {
        throw ModelIoError(std::string("malformed ") + kind + " model payload: " + e.what());
    }
    throw ModelIoError("unknown model_kind: " + kind);
}

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelIoError("cannot open model file for writing: " + path);
    out << model_to_json(model);
    if (!out) throw ModelIoError("failed while writing model file: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelIoError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace hpml::models

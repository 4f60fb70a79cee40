#include "hpml/models/params.hpp"

#include <cmath>
#include <set>

namespace hpml::models {

const std::vector<Family>& all_families() {
    static const std::vector<Family> families = {Family::linear, Family::svr, Family::tree,
                                                 Family::forest, Family::gbt};
    return families;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::linear: return "linear";
        case Family::svr: return "svr";
        case Family::tree: return "tree";
        case Family::forest: return "forest";
        case Family::gbt: return "gbt";
    }
    return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
    for (Family f : all_families())
        if (family_name(f) == name) return f;
    return std::nullopt;
}

std::string kernel_name(KernelType k) {
    switch (k) {
        case KernelType::linear: return "linear";
        case KernelType::rbf: return "rbf";
        case KernelType::polynomial: return "polynomial";
    }
    return "?";
}

std::optional<KernelType> kernel_from_name(const std::string& name) {
    if (name == "linear") return KernelType::linear;
    if (name == "rbf") return KernelType::rbf;
    if (name == "polynomial") return KernelType::polynomial;
    return std::nullopt;
}

namespace {

// Pulls typed values out of the bag and remembers which keys were
// consumed so leftovers can be rejected.
class ParamReader {
  public:
    explicit ParamReader(const HyperParams& hp) : hp_(hp) {}

    void number(const char* key, double& out) {
        auto it = hp_.find(key);
        if (it == hp_.end()) return;
        consumed_.insert(key);
        const double* v = std::get_if<double>(&it->second);
        if (!v) throw ParamError(std::string("parameter '") + key + "' must be numeric");
        out = *v;
    }

    void integer(const char* key, int& out) {
        double v = out;
        number(key, v);
        if (v != std::floor(v)) throw ParamError(std::string("parameter '") + key + "' must be an integer");
        out = static_cast<int>(v);
    }

    void boolean(const char* key, bool& out) {
        double v = out ? 1.0 : 0.0;
        number(key, v);
        if (v != 0.0 && v != 1.0) throw ParamError(std::string("parameter '") + key + "' must be 0 or 1");
        out = v != 0.0;
    }

    void text(const char* key, std::string& out) {
        auto it = hp_.find(key);
        if (it == hp_.end()) return;
        consumed_.insert(key);
        const std::string* v = std::get_if<std::string>(&it->second);
        if (!v) throw ParamError(std::string("parameter '") + key + "' must be a string");
        out = *v;
    }

    void finish() const {
        for (const auto& [key, value] : hp_)
            if (!consumed_.count(key)) throw ParamError("unknown parameter: " + key);
    }

  private:
    const HyperParams& hp_;
    std::set<std::string> consumed_;
};

void read_tree_keys(ParamReader& r, TreeParams& p) {
    r.number("cv_threshold", p.cv_threshold);
    r.integer("max_depth", p.max_depth);
    r.integer("min_samples_leaf", p.min_samples_leaf);
}

void check_tree(const TreeParams& p) {
    if (p.cv_threshold < 0) throw ParamError("cv_threshold must be non-negative");
    if (p.max_depth < 0) throw ParamError("max_depth must be >= 0 (0 = unlimited)");
    if (p.min_samples_leaf < 1) throw ParamError("min_samples_leaf must be >= 1");
}

}  // namespace

TreeParams tree_params_from(const HyperParams& hp) {
    TreeParams p;
    ParamReader r(hp);
    read_tree_keys(r, p);
    r.finish();
    check_tree(p);
    return p;
}

ForestParams forest_params_from(const HyperParams& hp) {
    ForestParams p;
    ParamReader r(hp);
    r.integer("n_trees", p.n_trees);
    r.integer("features_per_split", p.features_per_split);
    r.boolean("bootstrap", p.bootstrap);
    read_tree_keys(r, p.tree);
    r.finish();
    if (p.n_trees < 1) throw ParamError("n_trees must be >= 1");
    if (p.features_per_split < 0) throw ParamError("features_per_split must be >= 0 (0 = auto)");
    check_tree(p.tree);
    return p;
}

GbtParams gbt_params_from(const HyperParams& hp) {
    GbtParams p;
    ParamReader r(hp);
    r.integer("n_rounds", p.n_rounds);
    r.number("learning_rate", p.learning_rate);
    r.number("lambda", p.lambda);
    r.number("gamma", p.gamma);
    r.integer("max_depth", p.max_depth);
    r.number("subsample", p.subsample);
    r.finish();
    if (p.n_rounds < 0) throw ParamError("n_rounds must be >= 0");
    if (p.learning_rate <= 0 || p.learning_rate > 1)
        throw ParamError("learning_rate must be in (0, 1]");
    if (p.lambda < 0) throw ParamError("lambda must be non-negative");
    if (p.gamma < 0) throw ParamError("gamma must be non-negative");
    if (p.max_depth < 0) throw ParamError("max_depth must be >= 0 (0 = unlimited)");
    if (p.subsample <= 0 || p.subsample > 1) throw ParamError("subsample must be in (0, 1]");
    return p;
}

SvrParams svr_params_from(const HyperParams& hp) {
    SvrParams p;
    ParamReader r(hp);
    std::string kernel = kernel_name(p.kernel);
    r.text("kernel", kernel);
    auto k = kernel_from_name(kernel);
    if (!k) throw ParamError("unknown kernel: " + kernel);
    p.kernel = *k;
    r.number("C", p.C);
    r.number("epsilon", p.epsilon);
    r.number("gamma", p.gamma);
    r.integer("degree", p.degree);
    r.number("coef0", p.coef0);
    r.number("tol", p.tol);
    r.integer("max_passes", p.max_passes);
    r.finish();
    if (p.C <= 0) throw ParamError("C must be positive");
    if (p.epsilon < 0) throw ParamError("epsilon must be non-negative");
    if (p.gamma < 0) throw ParamError("gamma must be >= 0 (0 = auto)");
    if (p.degree < 1) throw ParamError("degree must be >= 1");
    if (p.tol <= 0) throw ParamError("tol must be positive");
    if (p.max_passes < 1) throw ParamError("max_passes must be >= 1");
    return p;
}

void check_params(Family f, const HyperParams& hp) {
    switch (f) {
        case Family::linear:
            if (!hp.empty()) throw ParamError("linear regression takes no parameters");
            break;
        case Family::svr: svr_params_from(hp); break;
        case Family::tree: tree_params_from(hp); break;
        case Family::forest: forest_params_from(hp); break;
        case Family::gbt: gbt_params_from(hp); break;
    }
}

}  // namespace hpml::models

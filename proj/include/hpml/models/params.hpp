#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hpml::models {

enum class Family { linear, svr, tree, forest, gbt };

const std::vector<Family>& all_families();
std::string family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

struct ParamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generic key->value bag used by grid search and config files. The typed
// per-family structs below are the source of truth for defaults; parsing
// rejects keys a family does not document.
using ParamValue = std::variant<double, std::string>;
using HyperParams = std::map<std::string, ParamValue>;

struct TreeParams {
    double cv_threshold = 0.10;  // stop when std/|mean| drops below this
    int max_depth = 12;          // 0 = unlimited
    int min_samples_leaf = 5;
};

struct ForestParams {
    int n_trees = 200;
    int features_per_split = 0;  // 0 = auto, ceil(M/3)
    bool bootstrap = true;
    TreeParams tree;  // stopping rules of the member trees
};

struct GbtParams {
    int n_rounds = 300;
    double learning_rate = 0.1;
    double lambda = 1.0;    // leaf L2 penalty
    double gamma = 0.0;     // per-split penalty
    int max_depth = 6;      // 0 = unlimited
    double subsample = 1.0; // row fraction per round, 1 = off
};

enum class KernelType { linear, rbf, polynomial };

struct SvrParams {
    KernelType kernel = KernelType::rbf;
    double C = 1e5;
    double epsilon = 1e4;   // tube half-width in dollars
    double gamma = 0.0;     // 0 = auto, 1/M after standardization
    int degree = 3;
    double coef0 = 1.0;
    double tol = 1e-3;      // KKT violation threshold, standardized units
    int max_passes = 100;   // one pass = n working-set updates
};

// Throw ParamError on unknown keys, wrong value types, or out-of-range
// values for the family.
TreeParams tree_params_from(const HyperParams& hp);
ForestParams forest_params_from(const HyperParams& hp);
GbtParams gbt_params_from(const HyperParams& hp);
SvrParams svr_params_from(const HyperParams& hp);
void check_params(Family f, const HyperParams& hp);

std::string kernel_name(KernelType k);
std::optional<KernelType> kernel_from_name(const std::string& name);

}  // namespace hpml::models

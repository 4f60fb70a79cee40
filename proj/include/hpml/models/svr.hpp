#pragma once

#include <span>
#include <vector>

#include "hpml/data.hpp"
#include "hpml/models/params.hpp"

namespace hpml::models {

struct SvrKernel {
    KernelType type = KernelType::rbf;
    double gamma = 1.0;  // resolved, never 0
    int degree = 3;
    double coef0 = 1.0;
};

double kernel_eval(const SvrKernel& kernel, std::span<const double> u, std::span<const double> v);

// Epsilon-insensitive SVR. Features and target are standardized
// internally (training means/stds, zero std treated as 1); support rows,
// dual coefficients and the intercept live in that standardized space and
// predictions are mapped back to dollars. epsilon and C are kept as
// given; the tube is epsilon/target_std wide internally.
struct SvrModel {
    SvrKernel kernel;
    std::vector<std::vector<double>> support_rows;  // standardized inputs
    std::vector<double> dual_coefficients;          // alpha_i - alpha_i*, in [-C, C]
    std::vector<size_t> support_indices;            // original training row indices
    double intercept = 0.0;
    double epsilon = 0.0;
    double C = 1.0;
    bool converged = false;

    std::vector<double> feature_mean, feature_std;
    double target_mean = 0.0;
    double target_std = 1.0;
    size_t n_features = 0;

    double predict(std::span<const double> row) const;
};

// Solves the standard SVR dual by SMO-style pairwise coordinate descent
// with maximal-violating-pair selection, stopping when the KKT violation
// drops below tol or after max_passes * n updates (converged flag records
// which). Rows with zero dual coefficient are not stored.
SvrModel fit_svr(const Dataset& train, const SvrParams& params);

}  // namespace hpml::models

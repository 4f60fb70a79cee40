#pragma once

#include <span>
#include <vector>

#include "hpml/data.hpp"

namespace hpml::models {

struct LinearModel {
    std::vector<double> coefficients;  // one per feature
    double intercept = 0.0;

    double predict(std::span<const double> row) const;
};

// Least-squares fit of target on features plus an intercept, solved with
// column-pivoted Householder QR. Rank-deficient systems get the
// minimum-norm solution via a complete orthogonal decomposition.
LinearModel fit_linear(const Dataset& train);

}  // namespace hpml::models

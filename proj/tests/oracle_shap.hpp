#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "hpml/models/io.hpp"

// Permutation-averaging Shapley oracle. Only viable for small M, which is
// exactly where it serves as an independent check.
namespace oracle_shap {

// Interventional coalition value for every bitmask over the full feature
// set: in-coalition features come from the row, the rest from each
// background row, averaged over the background.
inline std::vector<double> coalition_values(const hpml::models::Model& model,
                                            const std::vector<double>& row,
                                            const hpml::Dataset& background) {
    const size_t m = row.size();
    const size_t n_bg = background.n_rows();
    std::vector<double> value(size_t{1} << m, 0.0);
    std::vector<double> composite;
    for (size_t mask = 0; mask < value.size(); ++mask) {
        double sum = 0;
        for (size_t b = 0; b < n_bg; ++b) {
            composite = background.rows[b];
            for (size_t j = 0; j < m; ++j)
                if (mask & (size_t{1} << j)) composite[j] = row[j];
            sum += hpml::models::predict(model, composite);
        }
        value[mask] = sum / double(n_bg);
    }
    return value;
}

inline std::vector<double> permutation_shap(const hpml::models::Model& model,
                                            const std::vector<double>& row,
                                            const hpml::Dataset& background) {
    const size_t m = row.size();
    std::vector<double> value = coalition_values(model, row, background);

    std::vector<size_t> perm(m);
    std::iota(perm.begin(), perm.end(), size_t{0});
    std::vector<long double> phi(m, 0.0L);
    size_t count = 0;
    do {
        size_t mask = 0;
        for (size_t j : perm) {
            size_t bit = size_t{1} << j;
            phi[j] += value[mask | bit] - value[mask];
            mask |= bit;
        }
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<double> out(m);
    for (size_t j = 0; j < m; ++j) out[j] = double(phi[j] / count);
    return out;
}

}  // namespace oracle_shap

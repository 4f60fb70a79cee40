#pragma once

#include <algorithm>
#include <vector>

#include "hpml/data.hpp"

// Independent best-split search for checking CART split selection.
namespace oracle_split {

struct OracleSplit {
    bool found = false;
    size_t feature = 0;
    double threshold = 0.0;
    double reduction = 0.0;
};

inline double sse_of(const std::vector<double>& ys) {
    double mean = 0;
    for (double y : ys) mean += y;
    mean /= double(ys.size());
    double sse = 0;
    for (double y : ys) sse += (y - mean) * (y - mean);
    return sse;
}

// Exhaustive scan: every midpoint between consecutive distinct values of
// every feature, each side recomputed from scratch. Features ascending,
// thresholds ascending, strictly-better acceptance, both sides at least
// min_leaf rows.
inline OracleSplit oracle_best_split(const hpml::Dataset& ds, size_t min_leaf) {
    OracleSplit best;
    std::vector<double> all(ds.target);
    double parent = sse_of(all);

    for (size_t f = 0; f < ds.n_features(); ++f) {
        std::vector<double> values;
        for (const auto& row : ds.rows) values.push_back(row[f]);
        std::vector<double> sorted(values);
        std::sort(sorted.begin(), sorted.end());

        for (size_t i = 1; i < sorted.size(); ++i) {
            if (sorted[i] == sorted[i - 1]) continue;
            double thr = (sorted[i - 1] + sorted[i]) / 2.0;
            std::vector<double> left, right;
            for (size_t r = 0; r < ds.n_rows(); ++r)
                (values[r] <= thr ? left : right).push_back(ds.target[r]);
            if (left.size() < min_leaf || right.size() < min_leaf) continue;
            double reduction = parent - sse_of(left) - sse_of(right);
            if (reduction > best.reduction) {
                best = {true, f, thr, reduction};
            }
        }
    }
    return best;
}

}  // namespace oracle_split

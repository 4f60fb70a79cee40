#pragma once

#include <span>
#include <string>
#include <vector>

namespace hpml {

// Fully numeric feature matrix plus target prices. The model, evaluation
// and explanation layers all operate on this shape.
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> rows;  // n x M, finite values only
    std::vector<double> target;             // n prices in dollars

    size_t n_rows() const { return rows.size(); }
    size_t n_features() const { return feature_names.size(); }

    // Throws std::invalid_argument if shapes disagree or a value is non-finite.
    void check() const;

    Dataset subset(std::span<const size_t> indices) const;
};

// Cleaned-dataset CSV: header = feature names + "price", one row per sample.
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

}  // namespace hpml

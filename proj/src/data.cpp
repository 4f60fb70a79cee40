#include "hpml/data.hpp"

#include <cmath>
#include <stdexcept>

#include "hpml/csv.hpp"

namespace hpml {

void Dataset::check() const {
    if (rows.size() != target.size())
        throw std::invalid_argument("dataset: row count does not match target length");
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != feature_names.size())
            throw std::invalid_argument("dataset: row " + std::to_string(i) + " has wrong width");
        for (double v : rows[i])
            if (!std::isfinite(v))
                throw std::invalid_argument("dataset: non-finite feature value in row " + std::to_string(i));
        if (!std::isfinite(target[i]))
            throw std::invalid_argument("dataset: non-finite target in row " + std::to_string(i));
    }
}

Dataset Dataset::subset(std::span<const size_t> indices) const {
    Dataset out;
    out.feature_names = feature_names;
    out.rows.reserve(indices.size());
    out.target.reserve(indices.size());
    for (size_t idx : indices) {
        out.rows.push_back(rows.at(idx));
        out.target.push_back(target.at(idx));
    }
    return out;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
    csv::Table table;
    std::vector<std::string> header = ds.feature_names;
    header.push_back("price");
    table.rows.push_back(std::move(header));
    for (size_t i = 0; i < ds.n_rows(); ++i) {
        std::vector<std::string> cells;
        cells.reserve(ds.n_features() + 1);
        for (double v : ds.rows[i]) cells.push_back(csv::format_number(v));
        cells.push_back(csv::format_number(ds.target[i]));
        table.rows.push_back(std::move(cells));
    }
    csv::write_file(path, table);
}

Dataset read_dataset_csv(const std::string& path) {
    csv::Table table = csv::read_file(path);
    if (table.rows.empty()) throw std::runtime_error("dataset csv is empty: " + path);
    const auto& header = table.rows.front();
    if (header.empty() || header.back() != "price")
        throw std::runtime_error("dataset csv: last column must be 'price': " + path);

    Dataset ds;
    ds.feature_names.assign(header.begin(), header.end() - 1);
    for (size_t r = 1; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        if (cells.size() != header.size())
            throw std::runtime_error("dataset csv: row " + std::to_string(r) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        std::vector<double> row(cells.size() - 1);
        for (size_t c = 0; c + 1 < cells.size(); ++c) {
            double v;
            if (!csv::parse_number(cells[c], v))
                throw std::runtime_error("dataset csv: bad numeric cell at row " + std::to_string(r));
            row[c] = v;
        }
        double price;
        if (!csv::parse_number(cells.back(), price))
            throw std::runtime_error("dataset csv: bad price at row " + std::to_string(r));
        ds.rows.push_back(std::move(row));
        ds.target.push_back(price);
    }
    ds.check();
    return ds;
}

}  // namespace hpml

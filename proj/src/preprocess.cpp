#include "hpml/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hpml/csv.hpp"

namespace hpml::preprocess {

namespace {

bool contains(const std::string& haystack_lower, const char* needle) {
    return haystack_lower.find(needle) != std::string::npos;
}

std::string lowered(const std::optional<std::string>& text) {
    return text ? csv::to_lower(*text) : std::string();
}

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

Heating categorize_heating(const std::optional<std::string>& text) {
    std::string t = lowered(text);
    if (contains(t, "natural gas")) return Heating::natural_gas;
    if (contains(t, "baseboard")) return Heating::baseboard;
    return Heating::other;
}

Cooling categorize_cooling(const std::optional<std::string>& text) {
    std::string t = lowered(text);
    if (contains(t, "zoned")) return Cooling::zoned;
    if (contains(t, "central air")) return Cooling::central_air;
    return Cooling::other;
}

Basement categorize_basement(const std::optional<std::string>& text) {
    std::string t = lowered(text);
    if (contains(t, "walk-out") || contains(t, "walk out") || contains(t, "walkout"))
        return Basement::walkout;
    if (contains(t, "english")) return Basement::english;
    if (contains(t, "full")) return Basement::full;
    if (contains(t, "partial")) return Basement::partial;
    return Basement::none;
}

PropertyType categorize_property(const std::optional<std::string>& text) {
    std::string t = lowered(text);
    if (contains(t, "condo") || contains(t, "co-op") || contains(t, "coop"))
        return PropertyType::condo;
    if (contains(t, "town")) return PropertyType::townhouse;
    return PropertyType::single_family;
}

int combine_rooms(std::optional<int> carpet, std::optional<int> hardwood) {
    return carpet.value_or(0) + hardwood.value_or(0);
}

FilterResult filter_outliers(const std::vector<RawListing>& records) {
    FilterResult result;
    for (const auto& rec : records) {
        bool keep = rec.price.has_value() && *rec.price < 2'500'000.0 &&
                    (!rec.sqft || *rec.sqft <= 10'000.0);
        if (keep)
            result.kept.push_back(rec);
        else
            ++result.dropped;
    }
    return result;
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "sqft",        "year_built",       "car_spaces",  "beds",
        "baths_full",  "baths_half",       "total_rooms", "basement_sqft",
        "tax_annual",  "prop_single_family", "prop_condo", "prop_townhouse",
        "heat_natural_gas", "heat_baseboard", "heat_other",
        "cool_central_air", "cool_zoned",     "cool_other",
        "bsmt_none",   "bsmt_full",        "bsmt_partial", "bsmt_english",
        "bsmt_walkout"};
    return names;
}

Dataset build_dataset(const std::vector<RawListing>& records) {
    if (records.empty()) throw std::invalid_argument("build_dataset: no rows");

    // Column medians over present values, for imputation.
    auto median_double = [&](auto member) {
        std::vector<double> present;
        for (const auto& rec : records)
            if (rec.*member) present.push_back(static_cast<double>(*(rec.*member)));
        return median_of(std::move(present));
    };
    const double med_sqft = median_double(&RawListing::sqft);
    const double med_year = median_double(&RawListing::year_built);
    const double med_cars = median_double(&RawListing::car_spaces);
    const double med_beds = median_double(&RawListing::beds);
    const double med_bfull = median_double(&RawListing::baths_full);
    const double med_bhalf = median_double(&RawListing::baths_half);
    const double med_bsqft = median_double(&RawListing::basement_sqft);
    const double med_tax = median_double(&RawListing::tax_annual);

    Dataset ds;
    ds.feature_names = feature_names();
    ds.rows.reserve(records.size());
    ds.target.reserve(records.size());

    for (size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (!rec.price)
            throw std::invalid_argument("build_dataset: row " + std::to_string(i) +
                                        " has no price (filter_outliers first)");

        auto value_or_med = [](const auto& opt, double med) {
            return opt ? static_cast<double>(*opt) : med;
        };

        PropertyType prop = categorize_property(rec.property_type);
        Heating heat = categorize_heating(rec.heating);
        Cooling cool = categorize_cooling(rec.cooling);
        // The basement description carries the style wording; the plain
        // basement column is the fallback.
        Basement bsmt = rec.basement_description ? categorize_basement(rec.basement_description)
                                                 : categorize_basement(rec.basement);

        std::vector<double> row = {
            value_or_med(rec.sqft, med_sqft),
            value_or_med(rec.year_built, med_year),
            value_or_med(rec.car_spaces, med_cars),
            value_or_med(rec.beds, med_beds),
            value_or_med(rec.baths_full, med_bfull),
            value_or_med(rec.baths_half, med_bhalf),
            static_cast<double>(combine_rooms(rec.carpet_rooms, rec.hardwood_rooms)),
            value_or_med(rec.basement_sqft, med_bsqft),
            value_or_med(rec.tax_annual, med_tax),
            prop == PropertyType::single_family ? 1.0 : 0.0,
            prop == PropertyType::condo ? 1.0 : 0.0,
            prop == PropertyType::townhouse ? 1.0 : 0.0,
            heat == Heating::natural_gas ? 1.0 : 0.0,
            heat == Heating::baseboard ? 1.0 : 0.0,
            heat == Heating::other ? 1.0 : 0.0,
            cool == Cooling::central_air ? 1.0 : 0.0,
            cool == Cooling::zoned ? 1.0 : 0.0,
            cool == Cooling::other ? 1.0 : 0.0,
            bsmt == Basement::none ? 1.0 : 0.0,
            bsmt == Basement::full ? 1.0 : 0.0,
            bsmt == Basement::partial ? 1.0 : 0.0,
            bsmt == Basement::english ? 1.0 : 0.0,
            bsmt == Basement::walkout ? 1.0 : 0.0,
        };
        ds.rows.push_back(std::move(row));
        ds.target.push_back(*rec.price);
    }
    ds.check();
    return ds;
}

StatsTable summary_stats(const std::map<YearBucket, std::vector<RawListing>>& tables) {
    for (const auto& [bucket, rows] : tables)
        if (rows.empty())
            throw std::invalid_argument("summary_stats: empty bucket " + dataset::bucket_label(bucket));

    StatsTable stats;
    stats.attributes = {"year_built", "price",      "car_spaces",  "beds",
                        "baths",      "sqft",       "baths_full",  "baths_half",
                        "carpet_rooms", "hardwood_rooms", "total_rooms",
                        "basement_sqft", "tax_annual"};
    for (const auto& [bucket, rows] : tables) stats.buckets.push_back(bucket);

    stats.means.assign(stats.attributes.size(),
                       std::vector<std::optional<double>>(stats.buckets.size()));

    for (size_t b = 0; b < stats.buckets.size(); ++b) {
        const auto& rows = tables.at(stats.buckets[b]);
        auto mean_of = [&](auto value_fn) -> std::optional<double> {
            double sum = 0;
            size_t count = 0;
            for (const auto& rec : rows) {
                std::optional<double> v = value_fn(rec);
                if (v) {
                    sum += *v;
                    ++count;
                }
            }
            if (count == 0) return std::nullopt;
            return sum / static_cast<double>(count);
        };
        auto opt = [](const auto& field) -> std::optional<double> {
            if (!field) return std::nullopt;
            return static_cast<double>(*field);
        };

        size_t a = 0;
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.year_built); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.price); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.car_spaces); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.beds); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) -> std::optional<double> {
            // Reconstructed aggregate: full + half/2, needs at least one part.
            if (!r.baths_full && !r.baths_half) return std::nullopt;
            return r.baths_full.value_or(0) + 0.5 * r.baths_half.value_or(0);
        });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.sqft); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.baths_full); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.baths_half); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.carpet_rooms); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.hardwood_rooms); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) -> std::optional<double> {
            if (!r.carpet_rooms && !r.hardwood_rooms) return std::nullopt;
            return static_cast<double>(combine_rooms(r.carpet_rooms, r.hardwood_rooms));
        });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.basement_sqft); });
        stats.means[a++][b] = mean_of([&](const RawListing& r) { return opt(r.tax_annual); });
    }
    return stats;
}

void write_stats_csv(const StatsTable& stats, const std::string& path) {
    csv::Table table;
    std::vector<std::string> header = {"attribute"};
    for (auto b : stats.buckets) header.push_back(dataset::bucket_label(b));
    table.rows.push_back(std::move(header));
    for (size_t a = 0; a < stats.attributes.size(); ++a) {
        std::vector<std::string> row = {stats.attributes[a]};
        for (size_t b = 0; b < stats.buckets.size(); ++b) {
            const auto& m = stats.means[a][b];
            row.push_back(m ? csv::format_number(*m) : "");
        }
        table.rows.push_back(std::move(row));
    }
    csv::write_file(path, table);
}

CorrMatrix correlation_matrix(const Dataset& ds) {
    const size_t n = ds.n_rows();
    if (n < 2) throw std::invalid_argument("correlation_matrix: need at least 2 rows");
    const size_t m = ds.n_features() + 1;  // features plus price

    auto column = [&](size_t c) {
        std::vector<double> col(n);
        for (size_t i = 0; i < n; ++i) col[i] = c < ds.n_features() ? ds.rows[i][c] : ds.target[i];
        return col;
    };

    CorrMatrix corr;
    corr.names = ds.feature_names;
    corr.names.push_back("price");
    corr.values.assign(m, std::vector<double>(m, 0.0));
    corr.zero_variance.assign(m, false);

    std::vector<std::vector<double>> centered(m);
    std::vector<double> norms(m);
    for (size_t c = 0; c < m; ++c) {
        centered[c] = column(c);
        double mean = 0;
        for (double v : centered[c]) mean += v;
        mean /= static_cast<double>(n);
        double ss = 0;
        for (double& v : centered[c]) {
            v -= mean;
            ss += v * v;
        }
        norms[c] = std::sqrt(ss);
        corr.zero_variance[c] = norms[c] == 0.0;
    }

    for (size_t a = 0; a < m; ++a) {
        corr.values[a][a] = 1.0;
        for (size_t b = a + 1; b < m; ++b) {
            double r = 0.0;
            if (!corr.zero_variance[a] && !corr.zero_variance[b]) {
                double dot = 0;
                for (size_t i = 0; i < n; ++i) dot += centered[a][i] * centered[b][i];
                r = dot / (norms[a] * norms[b]);
                r = std::clamp(r, -1.0, 1.0);
            }
            corr.values[a][b] = r;
            corr.values[b][a] = r;
        }
    }
    return corr;
}

void write_corr_csv(const CorrMatrix& corr, const std::string& path) {
    csv::Table table;
    std::vector<std::string> header = {""};
    header.insert(header.end(), corr.names.begin(), corr.names.end());
    table.rows.push_back(std::move(header));
    for (size_t a = 0; a < corr.names.size(); ++a) {
        std::vector<std::string> row = {corr.names[a]};
        for (size_t b = 0; b < corr.names.size(); ++b)
            row.push_back(csv::format_number(corr.values[a][b]));
        table.rows.push_back(std::move(row));
    }
    csv::write_file(path, table);
}

CorrMatrix read_corr_csv(const std::string& path) {
    csv::Table table = csv::read_file(path);
    if (table.rows.size() < 2) throw std::runtime_error("correlation csv too small: " + path);
    CorrMatrix corr;
    const auto& header = table.rows.front();
    corr.names.assign(header.begin() + 1, header.end());
    const size_t m = corr.names.size();
    corr.zero_variance.assign(m, false);
    if (table.rows.size() != m + 1)
        throw std::runtime_error("correlation csv is not square: " + path);
    for (size_t a = 0; a < m; ++a) {
        const auto& cells = table.rows[a + 1];
        if (cells.size() != m + 1 || cells[0] != corr.names[a])
            throw std::runtime_error("correlation csv: bad row " + std::to_string(a + 1));
        std::vector<double> row(m);
        for (size_t b = 0; b < m; ++b) {
            double v;
            if (!csv::parse_number(cells[b + 1], v))
                throw std::runtime_error("correlation csv: bad cell in row " + std::to_string(a + 1));
            row[b] = v;
        }
        corr.values.push_back(std::move(row));
    }
    return corr;
}

}  // namespace hpml::preprocess

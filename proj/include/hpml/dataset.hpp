#pragma once

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpml::dataset {

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;
    auto operator<=>(const Date&) const = default;
};

// Accepts ISO-8601 "YYYY-MM-DD"; rejects impossible calendar dates.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& d);

// One scraped property record. Empty CSV cells become absent values.
struct RawListing {
    std::optional<double> sqft;
    std::optional<std::string> property_type;
    std::optional<int> year_built;
    std::optional<double> price;
    std::optional<int> car_spaces;
    std::string address;
    std::optional<std::string> high_school;
    std::optional<int> beds;
    std::optional<int> baths_full;
    std::optional<int> baths_half;
    std::optional<std::string> heating;
    std::optional<std::string> cooling;
    std::optional<int> carpet_rooms;
    std::optional<int> hardwood_rooms;
    std::optional<std::string> basement;
    std::optional<double> basement_sqft;
    std::optional<std::string> basement_description;
    std::optional<double> tax_annual;
    std::optional<Date> sold_date;
    std::string city;

    bool operator==(const RawListing&) const = default;
};

// Canonical CSV column names. Input headers may order them freely but
// must contain exactly this vocabulary.
const std::vector<std::string>& csv_columns();

struct RowIssue {
    size_t row = 0;  // 0-based index among data rows
    std::string reason;
    bool operator==(const RowIssue&) const = default;
};

struct LoadResult {
    std::vector<RawListing> records;
    std::vector<RowIssue> rejected;  // rows dropped during load (unparseable cells)
};

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reads a listings CSV. Missing file -> LoadError; unknown or missing
// column -> SchemaError naming the column; a cell that should be numeric
// but is not parseable rejects that row only.
LoadResult load_listings(const std::string& path);

// Inverse of load_listings; writes the canonical column order.
void write_listings(const std::vector<RawListing>& records, const std::string& path);

struct ValidationReport {
    size_t row_count = 0;
    std::map<std::string, size_t> missing_counts;  // keyed by CSV column name
    std::vector<RowIssue> rejected_rows;
};

// Counts absent fields and flags rows violating the record invariants:
// negative numerics, missing/unparseable sold_date, empty city.
ValidationReport validate(const std::vector<RawListing>& records);

// Rows failing validation removed, original order kept.
std::vector<RawListing> drop_rejected(const std::vector<RawListing>& records,
                                      const ValidationReport& report);

enum class YearBucket { y2018, y2019, y2020, y2021_22 };

const std::vector<YearBucket>& all_buckets();
std::string bucket_label(YearBucket b);                       // "2018" .. "2021-22"
std::optional<YearBucket> bucket_for_year(int year);          // outside 2018-2022 -> nullopt

struct PartitionResult {
    std::map<YearBucket, std::vector<RawListing>> buckets;
    size_t dropped = 0;  // sold outside 2018-2022
};

// Requires sold_date on every row (validate first).
PartitionResult partition_by_year(const std::vector<RawListing>& records);

}  // namespace hpml::dataset

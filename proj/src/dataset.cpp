#include "hpml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <set>

#include "hpml/csv.hpp"

namespace hpml::dataset {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return days[m - 1];
}

bool parse_int_field(std::string_view s, int& out) {
    double v;
    if (!csv::parse_number(s, v)) return false;
    double rounded = std::nearbyint(v);
    if (std::abs(v - rounded) > 1e-9) return false;
    out = static_cast<int>(rounded);
    return true;
}

}  // namespace

std::optional<Date> parse_iso_date(std::string_view text) {
    std::string t = csv::trim(text);
    if (t.size() != 10 || t[4] != '-' || t[7] != '-') return std::nullopt;
    auto num = [&](size_t pos, size_t len, int& out) {
        auto res = std::from_chars(t.data() + pos, t.data() + pos + len, out);
        return res.ec == std::errc() && res.ptr == t.data() + pos + len;
    };
    Date d;
    if (!num(0, 4, d.year) || !num(5, 2, d.month) || !num(8, 2, d.day)) return std::nullopt;
    if (d.month < 1 || d.month > 12) return std::nullopt;
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
    return d;
}

std::string format_iso_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "sqft",         "property_type", "year_built",    "price",
        "car_spaces",   "address",       "high_school",   "beds",
        "baths_full",   "baths_half",    "heating",       "cooling",
        "carpet_rooms", "hardwood_rooms", "basement",     "basement_sqft",
        "basement_description", "tax_annual", "sold_date", "city"};
    return cols;
}

namespace {

struct CellView {
    const std::vector<std::string>* cells;
    const std::map<std::string, size_t>* index;

    const std::string& operator[](const std::string& name) const {
        return (*cells)[index->at(name)];
    }
};

// Returns empty optional for an empty cell; false return = unparseable.
template <typename T, typename ParseFn>
bool read_optional(const std::string& cell, std::optional<T>& out, ParseFn parse) {
    if (csv::trim(cell).empty()) {
        out = std::nullopt;
        return true;
    }
    T value;
    if (!parse(cell, value)) return false;
    out = value;
    return true;
}

}  // namespace

LoadResult load_listings(const std::string& path) {
    if (!std::filesystem::exists(path)) throw LoadError("no such file: " + path);
    csv::Table table = csv::read_file(path);
    if (table.rows.empty()) throw SchemaError("missing header row: " + path);

    const auto& header = table.rows.front();
    std::map<std::string, size_t> index;
    std::set<std::string> known(csv_columns().begin(), csv_columns().end());
    for (size_t c = 0; c < header.size(); ++c) {
        std::string name = csv::trim(header[c]);
        if (!known.count(name)) throw SchemaError("unknown column: " + name);
        if (index.count(name)) throw SchemaError("duplicate column: " + name);
        index[name] = c;
    }
    for (const auto& name : csv_columns())
        if (!index.count(name)) throw SchemaError("missing column: " + name);

    LoadResult result;
    for (size_t r = 1; r < table.rows.size(); ++r) {
        const size_t row_idx = r - 1;
        const auto& cells = table.rows[r];
        if (cells.size() != header.size()) {
            result.rejected.push_back({row_idx, "wrong cell count"});
            continue;
        }
        CellView view{&cells, &index};
        RawListing rec;
        std::string bad_column;

        auto opt_double = [&](const char* name, std::optional<double>& out) {
            if (!read_optional<double>(view[name], out, csv::parse_number) && bad_column.empty())
                bad_column = name;
        };
        auto opt_int = [&](const char* name, std::optional<int>& out) {
            if (!read_optional<int>(view[name], out, parse_int_field) && bad_column.empty())
                bad_column = name;
        };
        auto opt_text = [&](const char* name, std::optional<std::string>& out) {
            std::string t = csv::trim(view[name]);
            out = t.empty() ? std::nullopt : std::optional<std::string>(std::move(t));
        };

        opt_double("sqft", rec.sqft);
        opt_text("property_type", rec.property_type);
        opt_int("year_built", rec.year_built);
        opt_double("price", rec.price);
        opt_int("car_spaces", rec.car_spaces);
        rec.address = csv::trim(view["address"]);
        opt_text("high_school", rec.high_school);
        opt_int("beds", rec.beds);
        opt_int("baths_full", rec.baths_full);
        opt_int("baths_half", rec.baths_half);
        opt_text("heating", rec.heating);
        opt_text("cooling", rec.cooling);
        opt_int("carpet_rooms", rec.carpet_rooms);
        opt_int("hardwood_rooms", rec.hardwood_rooms);
        opt_text("basement", rec.basement);
        opt_double("basement_sqft", rec.basement_sqft);
        opt_text("basement_description", rec.basement_description);
        opt_double("tax_annual", rec.tax_annual);
        rec.city = csv::trim(view["city"]);

        // sold_date: absent stays absent here; validate() rejects it later.
        std::string date_text = csv::trim(view["sold_date"]);
        if (!date_text.empty()) rec.sold_date = parse_iso_date(date_text);

        if (!bad_column.empty()) {
            result.rejected.push_back({row_idx, "unparseable numeric cell: " + bad_column});
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

void write_listings(const std::vector<RawListing>& records, const std::string& path) {
    csv::Table table;
    table.rows.push_back(csv_columns());
    auto num = [](const auto& opt) -> std::string {
        return opt ? csv::format_number(static_cast<double>(*opt)) : "";
    };
    auto text = [](const std::optional<std::string>& opt) { return opt.value_or(""); };
    for (const auto& rec : records) {
        table.rows.push_back({
            num(rec.sqft),
            text(rec.property_type),
            num(rec.year_built),
            num(rec.price),
            num(rec.car_spaces),
            rec.address,
            text(rec.high_school),
            num(rec.beds),
            num(rec.baths_full),
            num(rec.baths_half),
            text(rec.heating),
            text(rec.cooling),
            num(rec.carpet_rooms),
            num(rec.hardwood_rooms),
            text(rec.basement),
            num(rec.basement_sqft),
            text(rec.basement_description),
            num(rec.tax_annual),
            rec.sold_date ? format_iso_date(*rec.sold_date) : "",
            rec.city,
        });
    }
    csv::write_file(path, table);
}

ValidationReport validate(const std::vector<RawListing>& records) {
    ValidationReport report;
    report.row_count = records.size();
    for (const auto& name : csv_columns()) report.missing_counts[name] = 0;

    for (size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        auto miss = [&](const char* name, bool absent) {
            if (absent) ++report.missing_counts[name];
        };
        miss("sqft", !rec.sqft);
        miss("property_type", !rec.property_type);
        miss("year_built", !rec.year_built);
        miss("price", !rec.price);
        miss("car_spaces", !rec.car_spaces);
        miss("address", rec.address.empty());
        miss("high_school", !rec.high_school);
        miss("beds", !rec.beds);
        miss("baths_full", !rec.baths_full);
        miss("baths_half", !rec.baths_half);
        miss("heating", !rec.heating);
        miss("cooling", !rec.cooling);
        miss("carpet_rooms", !rec.carpet_rooms);
        miss("hardwood_rooms", !rec.hardwood_rooms);
        miss("basement", !rec.basement);
        miss("basement_sqft", !rec.basement_sqft);
        miss("basement_description", !rec.basement_description);
        miss("tax_annual", !rec.tax_annual);
        miss("sold_date", !rec.sold_date);
        miss("city", rec.city.empty());

        bool negative = (rec.sqft && *rec.sqft < 0) || (rec.year_built && *rec.year_built < 0) ||
                        (rec.price && *rec.price < 0) || (rec.car_spaces && *rec.car_spaces < 0) ||
                        (rec.beds && *rec.beds < 0) || (rec.baths_full && *rec.baths_full < 0) ||
                        (rec.baths_half && *rec.baths_half < 0) ||
                        (rec.carpet_rooms && *rec.carpet_rooms < 0) ||
                        (rec.hardwood_rooms && *rec.hardwood_rooms < 0) ||
                        (rec.basement_sqft && *rec.basement_sqft < 0) ||
                        (rec.tax_annual && *rec.tax_annual < 0);
        if (negative) {
            report.rejected_rows.push_back({i, "negative value"});
        } else if (!rec.sold_date) {
            report.rejected_rows.push_back({i, "missing or unparseable sold_date"});
        } else if (rec.city.empty()) {
            report.rejected_rows.push_back({i, "empty city"});
        }
    }
    return report;
}

std::vector<RawListing> drop_rejected(const std::vector<RawListing>& records,
                                      const ValidationReport& report) {
    std::set<size_t> bad;
    for (const auto& issue : report.rejected_rows) bad.insert(issue.row);
    std::vector<RawListing> kept;
    kept.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i)
        if (!bad.count(i)) kept.push_back(records[i]);
    return kept;
}

const std::vector<YearBucket>& all_buckets() {
    static const std::vector<YearBucket> buckets = {YearBucket::y2018, YearBucket::y2019,
                                                    YearBucket::y2020, YearBucket::y2021_22};
    return buckets;
}

std::string bucket_label(YearBucket b) {
    switch (b) {
        case YearBucket::y2018: return "2018";
        case YearBucket::y2019: return "2019";
        case YearBucket::y2020: return "2020";
        case YearBucket::y2021_22: return "2021-22";
    }
    return "?";
}

std::optional<YearBucket> bucket_for_year(int year) {
    switch (year) {
        case 2018: return YearBucket::y2018;
        case 2019: return YearBucket::y2019;
        case 2020: return YearBucket::y2020;
        case 2021:
        case 2022: return YearBucket::y2021_22;
        default: return std::nullopt;
    }
}

PartitionResult partition_by_year(const std::vector<RawListing>& records) {
    PartitionResult result;
    for (const auto& rec : records) {
        if (!rec.sold_date)
            throw std::invalid_argument("partition_by_year: record without sold_date");
        auto bucket = bucket_for_year(rec.sold_date->year);
        if (!bucket) {
            ++result.dropped;
            continue;
        }
        result.buckets[*bucket].push_back(rec);
    }
    return result;
}

}  // namespace hpml::dataset

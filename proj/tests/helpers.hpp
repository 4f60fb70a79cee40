#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hpml/data.hpp"
#include "hpml/dataset.hpp"
#include "hpml/rng.hpp"

namespace test_helpers {

// Scratch directory removed when the test scope closes.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        base_ = std::filesystem::temp_directory_path() /
                ("hpml_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(base_);
        std::filesystem::create_directories(base_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(base_, ec);
    }
    std::string path(const std::string& name) const { return (base_ / name).string(); }
    std::string root() const { return base_.string(); }

  private:
    std::filesystem::path base_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    size_t count = 0;
    for (size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

// Random dense regression dataset; targets are a noisy linear blend so every
// model family has something to fit.
inline hpml::Dataset random_dataset(size_t rows, size_t cols, uint64_t seed) {
    hpml::Rng rng(seed);
    hpml::Dataset ds;
    for (size_t j = 0; j < cols; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    std::vector<double> w(cols);
    for (size_t j = 0; j < cols; ++j) w[j] = rng.next_double() * 4.0 - 2.0;
    for (size_t i = 0; i < rows; ++i) {
        std::vector<double> row(cols);
        double y = rng.next_double();
        for (size_t j = 0; j < cols; ++j) {
            row[j] = rng.next_double() * 10.0 - 5.0;
            y += w[j] * row[j];
        }
        ds.rows.push_back(std::move(row));
        ds.target.push_back(y);
    }
    return ds;
}

// Synthetic hedonic listings. Price is a deliberately nonlinear function of
// square footage, tax, and bathrooms (steps, a non-monotone bump, and an
// interaction), so tree ensembles have headroom over the linear fit:
//   tax   = 2200 + 3.1*sqft + U(-1500, 1500)
//   price = 52000 + 45*sqft + 1.0*tax + 9000*baths_full
//           + 80000*[sqft > 2800] + 90000*[1700 < sqft <= 2400]
//           + 22000*baths_full*[tax > 9000]
//           + 9000*(sale year - 2018) + U(-12000, 12000)
inline std::vector<hpml::dataset::RawListing> synthetic_listings(size_t n, uint64_t seed) {
    using hpml::dataset::Date;
    using hpml::dataset::RawListing;
    hpml::Rng rng(seed);

    const std::vector<std::string> heat = {"Natural Gas, Forced Air", "Baseboard, Radiant",
                                           "Electric Heat Pump"};
    const std::vector<std::string> cool = {"Central Air", "Zoned Air Conditioning",
                                           "Window Units"};
    const std::vector<std::string> bsmt = {"Full, Finished", "Partial, Unfinished",
                                           "Walk-Out Access", "English Lookout", "None"};
    const std::vector<std::string> prop = {"Single Family Residential", "Condo/Co-op",
                                           "Townhouse"};
    const std::vector<std::string> cities = {"Naperville", "Aurora", "Wheaton", "Lisle"};

    std::vector<RawListing> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        RawListing rec;
        double sqft = 900.0 + std::floor(rng.next_double() * 2600.0);
        double tax = 2200.0 + 3.1 * sqft + (rng.next_double() * 3000.0 - 1500.0);
        tax = std::floor(tax);
        int baths_full = 1 + static_cast<int>(rng.index(3));
        int year = 2018 + static_cast<int>(rng.index(5));

        double price = 52000.0 + 45.0 * sqft + 1.0 * tax + 9000.0 * baths_full;
        if (sqft > 2800.0) price += 80000.0;
        if (sqft > 1700.0 && sqft <= 2400.0) price += 90000.0;
        if (tax > 9000.0) price += 22000.0 * baths_full;
        price += 9000.0 * (year - 2018);
        price += rng.next_double() * 24000.0 - 12000.0;
        price = std::floor(price);

        rec.sqft = sqft;
        rec.tax_annual = tax;
        rec.baths_full = baths_full;
        rec.baths_half = static_cast<int>(rng.index(2));
        rec.beds = 2 + static_cast<int>(rng.index(4));
        rec.price = price;
        rec.year_built = 1950 + static_cast<int>(rng.index(70));
        rec.car_spaces = static_cast<int>(rng.index(4));
        rec.carpet_rooms = static_cast<int>(rng.index(5));
        rec.hardwood_rooms = static_cast<int>(rng.index(5));
        rec.heating = heat[rng.index(heat.size())];
        rec.cooling = cool[rng.index(cool.size())];
        rec.basement_description = bsmt[rng.index(bsmt.size())];
        rec.basement = rec.basement_description;
        rec.basement_sqft = rec.basement_description == "None" ? 0.0 : std::floor(sqft * 0.4);
        rec.property_type = prop[rng.index(prop.size())];
        rec.address = std::to_string(100 + i) + " Elm St";
        rec.city = cities[rng.index(cities.size())];
        rec.high_school = rng.index(10) == 0 ? std::nullopt
                                             : std::optional<std::string>("Central High");
        int month = 1 + static_cast<int>(rng.index(12));
        int day = 1 + static_cast<int>(rng.index(28));
        rec.sold_date = Date{year, month, day};
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace test_helpers

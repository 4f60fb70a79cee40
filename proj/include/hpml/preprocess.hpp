#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpml/data.hpp"
#include "hpml/dataset.hpp"

namespace hpml::preprocess {

using dataset::RawListing;
using dataset::YearBucket;

enum class Heating { natural_gas, baseboard, other };
enum class Cooling { central_air, zoned, other };
enum class Basement { none, full, partial, english, walkout };
enum class PropertyType { single_family, condo, townhouse };

// Case-insensitive substring rules over the raw description text.
Heating categorize_heating(const std::optional<std::string>& text);
// "zoned" wins over "central air" when both appear.
Cooling categorize_cooling(const std::optional<std::string>& text);
// Priority: walk-out, then english, then full, then partial; no match -> none.
Basement categorize_basement(const std::optional<std::string>& text);
// "condo"/"co-op" -> condo, "town..." -> townhouse, everything else
// (including absent) -> single_family.
PropertyType categorize_property(const std::optional<std::string>& text);

// carpet + hardwood, absent counts as zero.
int combine_rooms(std::optional<int> carpet, std::optional<int> hardwood);

struct FilterResult {
    std::vector<RawListing> kept;  // subsequence of the input
    size_t dropped = 0;
};

// Keeps rows with a price below $2,500,000 and square footage (when
// present) of at most 10,000; rows without a price are dropped.
FilterResult filter_outliers(const std::vector<RawListing>& records);

// Fixed model-matrix column order.
const std::vector<std::string>& feature_names();

// Applies the categorizers, one-hot expansion and room combination, then
// imputes remaining absent numerics with the column median of the input
// table (mean of the two middle values for even counts; 0 if the whole
// column is absent). Requires price on every row; throws on empty input.
Dataset build_dataset(const std::vector<RawListing>& records);

// Table-1-shaped per-bucket means. Means skip absent cells; an attribute
// absent in a whole bucket yields an absent mean. baths is reconstructed
// as baths_full + 0.5 * baths_half, total_rooms as carpet + hardwood.
struct StatsTable {
    std::vector<std::string> attributes;
    std::vector<YearBucket> buckets;
    // means[attribute index][bucket index]
    std::vector<std::vector<std::optional<double>>> means;
};

StatsTable summary_stats(const std::map<YearBucket, std::vector<RawListing>>& tables);
void write_stats_csv(const StatsTable& stats, const std::string& path);

struct CorrMatrix {
    std::vector<std::string> names;  // feature columns plus "price"
    std::vector<std::vector<double>> values;
    std::vector<bool> zero_variance;  // per column; pairs involving one are 0
};

// Pearson correlation over all feature columns plus price. Requires at
// least two rows.
CorrMatrix correlation_matrix(const Dataset& ds);
void write_corr_csv(const CorrMatrix& corr, const std::string& path);
CorrMatrix read_corr_csv(const std::string& path);

}  // namespace hpml::preprocess

#pragma once

#include <string>
#include <vector>

#include "hpml/explain.hpp"
#include "hpml/preprocess.hpp"

namespace hpml::svg {

// Fixed-decimal formatting keeps the rendered bytes identical across runs.
std::string format_fixed(double v, int decimals);

// Diverging blue-white-red over [-1, 1].
std::string diverging_color(double v);
// Low-to-high blue-red over [0, 1] for feature-value coloring.
std::string gradient_color(double t);

std::string heatmap_svg(const preprocess::CorrMatrix& corr);

struct BeeswarmRow {
    std::string feature;
    std::vector<explain::FeaturePoint> points;
};

// Rows are drawn top to bottom in the given order (callers rank them first).
std::string beeswarm_svg(const std::string& title, const std::vector<BeeswarmRow>& rows);

}  // namespace hpml::svg

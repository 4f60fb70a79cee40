#include "hpml/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hpml::svg {

namespace {

std::string rgb(double r, double g, double b) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(r)),
                  static_cast<int>(std::lround(g)), static_cast<int>(std::lround(b)));
    return buf;
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

std::string escape_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

// Stable per-point jitter so reruns plot identical pixels.
double jitter_unit(size_t row, size_t col) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(row);
    mix(col);
    return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

void text_at(std::string& out, double x, double y, const std::string& anchor,
             const std::string& content, const std::string& extra = "") {
    out += "<text x=\"" + format_fixed(x, 1) + "\" y=\"" + format_fixed(y, 1) +
           "\" text-anchor=\"" + anchor + "\"" + extra + ">" + escape_text(content) + "</text>\n";
}

}  // namespace

std::string format_fixed(double v, int decimals) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string diverging_color(double v) {
    v = std::clamp(v, -1.0, 1.0);
    if (v >= 0.0) {
        return rgb(lerp(255, 178, v), lerp(255, 24, v), lerp(255, 43, v));
    }
    return rgb(lerp(255, 33, -v), lerp(255, 102, -v), lerp(255, 172, -v));
}

std::string gradient_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return rgb(lerp(59, 214, t), lerp(76, 39, t), lerp(192, 89, t));
}

std::string heatmap_svg(const preprocess::CorrMatrix& corr) {
    size_t n = corr.names.size();
    const double cell = 24.0;
    const double left = 130.0;
    const double top = 40.0;
    const double bottom = 130.0;
    const double right = 20.0;
    double width = left + cell * static_cast<double>(n) + right;
    double height = top + cell * static_cast<double>(n) + bottom;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_fixed(width, 0) +
           "\" height=\"" + format_fixed(height, 0) + "\" font-family=\"monospace\" font-size=\"11\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    text_at(out, left, 24.0, "start", "feature correlation", " font-size=\"14\"");

    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double x = left + cell * static_cast<double>(j);
            double y = top + cell * static_cast<double>(i);
            out += "<rect x=\"" + format_fixed(x, 1) + "\" y=\"" + format_fixed(y, 1) +
                   "\" width=\"" + format_fixed(cell, 1) + "\" height=\"" + format_fixed(cell, 1) +
                   "\" fill=\"" + diverging_color(corr.values[i][j]) +
                   "\" stroke=\"#dddddd\" stroke-width=\"0.5\">";
            out += "<title>" + escape_text(corr.names[i]) + " / " + escape_text(corr.names[j]) +
                   ": " + format_fixed(corr.values[i][j], 3) + "</title></rect>\n";
        }
    }
    for (size_t i = 0; i < n; ++i) {
        double y = top + cell * static_cast<double>(i) + cell * 0.5 + 4.0;
        text_at(out, left - 6.0, y, "end", corr.names[i]);
    }
    for (size_t j = 0; j < n; ++j) {
        double x = left + cell * static_cast<double>(j) + cell * 0.5 + 4.0;
        double y = top + cell * static_cast<double>(n) + 6.0;
        out += "<text x=\"0\" y=\"0\" text-anchor=\"end\" transform=\"translate(" +
               format_fixed(x, 1) + "," + format_fixed(y, 1) + ") rotate(-90)\">" +
               escape_text(corr.names[j]) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string beeswarm_svg(const std::string& title, const std::vector<BeeswarmRow>& rows) {
    const double left = 150.0;
    const double top = 50.0;
    const double row_h = 26.0;
    const double plot_w = 520.0;
    const double bottom = 50.0;
    double height = top + row_h * static_cast<double>(rows.size()) + bottom;
    double width = left + plot_w + 40.0;

    double max_abs = 0.0;
    for (const BeeswarmRow& row : rows) {
        for (const explain::FeaturePoint& p : row.points) {
            max_abs = std::max(max_abs, std::abs(p.phi));
        }
    }
    if (max_abs == 0.0) max_abs = 1.0;
    auto x_of = [&](double phi) { return left + (phi / max_abs + 1.0) * 0.5 * plot_w; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_fixed(width, 0) +
           "\" height=\"" + format_fixed(height, 0) + "\" font-family=\"monospace\" font-size=\"11\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    text_at(out, left, 24.0, "start", title, " font-size=\"14\"");

    double plot_bottom = top + row_h * static_cast<double>(rows.size());
    out += "<line x1=\"" + format_fixed(x_of(0.0), 1) + "\" y1=\"" + format_fixed(top, 1) +
           "\" x2=\"" + format_fixed(x_of(0.0), 1) + "\" y2=\"" + format_fixed(plot_bottom, 1) +
           "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";

    for (size_t r = 0; r < rows.size(); ++r) {
        const BeeswarmRow& row = rows[r];
        double yc = top + row_h * static_cast<double>(r) + row_h * 0.5;
        text_at(out, left - 8.0, yc + 4.0, "end", row.feature);

        double vmin = 0.0;
        double vmax = 0.0;
        if (!row.points.empty()) {
            vmin = vmax = row.points[0].value;
            for (const explain::FeaturePoint& p : row.points) {
                vmin = std::min(vmin, p.value);
                vmax = std::max(vmax, p.value);
            }
        }
        for (size_t i = 0; i < row.points.size(); ++i) {
            const explain::FeaturePoint& p = row.points[i];
            double t = vmax > vmin ? (p.value - vmin) / (vmax - vmin) : 0.5;
            double cy = yc + jitter_unit(r, i) * row_h * 0.32;
            out += "<circle cx=\"" + format_fixed(x_of(p.phi), 1) + "\" cy=\"" +
                   format_fixed(cy, 1) + "\" r=\"2.5\" fill=\"" + gradient_color(t) +
                   "\" fill-opacity=\"0.8\"/>\n";
        }
    }

    double axis_y = plot_bottom + 18.0;
    text_at(out, x_of(-max_abs), axis_y, "middle", format_fixed(-max_abs, 0));
    text_at(out, x_of(0.0), axis_y, "middle", "0");
    text_at(out, x_of(max_abs), axis_y, "middle", format_fixed(max_abs, 0));
    text_at(out, left + plot_w * 0.5, axis_y + 20.0, "middle", "shap value (usd)");
    out += "</svg>\n";
    return out;
}

}  // namespace hpml::svg

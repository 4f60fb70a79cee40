#include "hpml/pipeline.hpp"

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "hpml/csv.hpp"
#include "hpml/explain.hpp"
#include "hpml/models/io.hpp"
#include "hpml/parser.hpp"
#include "hpml/preprocess.hpp"
#include "hpml/rng.hpp"
#include "hpml/svg.hpp"
#include "json.hpp"

namespace hpml::pipeline {

namespace fs = std::filesystem;
using dataset::RawListing;
using dataset::YearBucket;
using nlohmann::json;

namespace {

std::optional<YearBucket> bucket_from_label(const std::string& label) {
    for (YearBucket b : dataset::all_buckets()) {
        if (dataset::bucket_label(b) == label) return b;
    }
    return std::nullopt;
}

std::string out_path(const RunConfig& config, const std::string& name) {
    fs::create_directories(config.out_dir);
    return (fs::path(config.out_dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("failed while writing: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void require_header(const csv::Table& table, const std::vector<std::string>& expected,
                    const std::string& what) {
    if (table.rows.empty()) throw std::invalid_argument(what + ": missing header row");
    const std::vector<std::string>& header = table.rows[0];
    for (size_t i = 0; i < expected.size(); ++i) {
        if (i >= header.size() || header[i] != expected[i]) {
            throw std::invalid_argument(what + ": expected column '" + expected[i] + "' at position " +
                                        std::to_string(i + 1));
        }
    }
    if (header.size() > expected.size()) {
        throw std::invalid_argument(what + ": unexpected column '" + header[expected.size()] + "'");
    }
}

double cell_number(const std::string& cell, const std::string& what) {
    double value;
    if (!csv::parse_number(cell, value)) {
        throw std::invalid_argument(what + ": unparseable number '" + cell + "'");
    }
    return value;
}

// Kept rows of the cleaning pass plus their bucket labels, before encoding.
struct CleanRows {
    std::vector<RawListing> records;
    std::vector<std::string> labels;
    size_t input_rows = 0;
    size_t load_rejected = 0;
    size_t validation_rejected = 0;
    size_t outliers_dropped = 0;
    size_t out_of_range = 0;
    std::map<std::string, size_t> missing_counts;
};

CleanRows clean_rows(const std::string& in_csv) {
    CleanRows out;
    dataset::LoadResult loaded = dataset::load_listings(in_csv);
    out.input_rows = loaded.records.size() + loaded.rejected.size();
    out.load_rejected = loaded.rejected.size();

    dataset::ValidationReport report = dataset::validate(loaded.records);
    out.validation_rejected = report.rejected_rows.size();
    out.missing_counts = report.missing_counts;
    std::vector<RawListing> valid = dataset::drop_rejected(loaded.records, report);

    preprocess::FilterResult filtered = preprocess::filter_outliers(valid);
    out.outliers_dropped = filtered.dropped;

    for (RawListing& rec : filtered.kept) {
        std::optional<YearBucket> bucket = dataset::bucket_for_year(rec.sold_date->year);
        if (!bucket) {
            ++out.out_of_range;
            continue;
        }
        out.labels.push_back(dataset::bucket_label(*bucket));
        out.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

void apply_config_json(RunConfig& config, const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw std::invalid_argument("config file is not a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "seed") {
            config.seed = value.get<uint64_t>();
        } else if (key == "test_fraction") {
            config.test_fraction = value.get<double>();
        } else if (key == "k_folds") {
            config.k_folds = value.get<int>();
        } else if (key == "background_size") {
            config.background_size = value.get<size_t>();
        } else if (key == "explain_budget") {
            config.explain_budget = value.get<size_t>();
        } else if (key == "families") {
            config.families.clear();
            for (const json& name : value) {
                std::optional<models::Family> family =
                    models::family_from_name(name.get<std::string>());
                if (!family) {
                    throw std::invalid_argument("config names unknown family: " +
                                                name.get<std::string>());
                }
                config.families.push_back(*family);
            }
            if (config.families.empty()) throw std::invalid_argument("config families is empty");
        } else if (key == "buckets") {
            config.buckets.clear();
            for (const json& name : value) {
                std::optional<YearBucket> bucket = bucket_from_label(name.get<std::string>());
                if (!bucket) {
                    throw std::invalid_argument("config names unknown bucket: " +
                                                name.get<std::string>());
                }
                config.buckets.push_back(*bucket);
            }
            if (config.buckets.empty()) throw std::invalid_argument("config buckets is empty");
        } else if (key == "grids") {
            std::map<models::Family, std::vector<models::HyperParams>> grids =
                eval::grids_from_json(value.dump());
            for (auto& [family, grid] : grids) config.grids[family] = std::move(grid);
        } else if (key == "explain_family") {
            std::optional<models::Family> family =
                models::family_from_name(value.get<std::string>());
            if (!family) {
                throw std::invalid_argument("config names unknown family: " +
                                            value.get<std::string>());
            }
            config.explain_family = *family;
        } else if (key == "explain_params") {
            config.explain_params = eval::hyperparams_from_json(value.dump());
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
}

void apply_config_file(RunConfig& config, const std::string& path) {
    apply_config_json(config, read_text_file(path));
}

void write_clean_csv(const CleanTable& table, const std::string& path) {
    if (table.bucket_labels.size() != table.all.n_rows()) {
        throw std::invalid_argument("clean table label count mismatch");
    }
    std::string out;
    std::vector<std::string> header;
    header.emplace_back("bucket");
    header.insert(header.end(), table.all.feature_names.begin(), table.all.feature_names.end());
    header.emplace_back("price");
    out += csv::join_row(header);
    out += '\n';
    for (size_t i = 0; i < table.all.n_rows(); ++i) {
        std::vector<std::string> row;
        row.push_back(table.bucket_labels[i]);
        for (double v : table.all.rows[i]) row.push_back(csv::format_number(v));
        row.push_back(csv::format_number(table.all.target[i]));
        out += csv::join_row(row);
        out += '\n';
    }
    write_text_file(path, out);
}

CleanTable read_clean_csv(const std::string& path) {
    csv::Table table = csv::read_file(path);
    std::vector<std::string> expected;
    expected.emplace_back("bucket");
    const std::vector<std::string>& features = preprocess::feature_names();
    expected.insert(expected.end(), features.begin(), features.end());
    expected.emplace_back("price");
    require_header(table, expected, "clean csv");

    CleanTable out;
    out.all.feature_names = features;
    for (size_t r = 1; r < table.rows.size(); ++r) {
        const std::vector<std::string>& row = table.rows[r];
        if (row.size() != expected.size()) {
            throw std::invalid_argument("clean csv: row " + std::to_string(r) + " has " +
                                        std::to_string(row.size()) + " cells, want " +
                                        std::to_string(expected.size()));
        }
        if (!bucket_from_label(row[0])) {
            throw std::invalid_argument("clean csv: unknown bucket label '" + row[0] + "'");
        }
        out.bucket_labels.push_back(row[0]);
        std::vector<double> values;
        values.reserve(features.size());
        for (size_t c = 1; c + 1 < row.size(); ++c) {
            values.push_back(cell_number(row[c], "clean csv"));
        }
        out.all.rows.push_back(std::move(values));
        out.all.target.push_back(cell_number(row.back(), "clean csv"));
    }
    return out;
}

std::map<YearBucket, Dataset> split_buckets(const CleanTable& table) {
    std::map<YearBucket, Dataset> out;
    for (size_t i = 0; i < table.all.n_rows(); ++i) {
        YearBucket bucket = *bucket_from_label(table.bucket_labels[i]);
        Dataset& ds = out[bucket];
        if (ds.feature_names.empty()) ds.feature_names = table.all.feature_names;
        ds.rows.push_back(table.all.rows[i]);
        ds.target.push_back(table.all.target[i]);
    }
    return out;
}

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for digest: " + path);
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof(buf));
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

void write_manifest(const std::string& command, const RunConfig& config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    json doc;
    doc["command"] = command;
    doc["version"] = kVersion;
    doc["seed"] = config.seed;
    doc["timestamp"] = timestamp_utc();
    json in = json::object();
    for (const std::string& path : inputs) {
        char hex[24];
        std::snprintf(hex, sizeof(hex), "fnv1a:%016llx",
                      static_cast<unsigned long long>(fnv1a_file(path)));
        in[path] = hex;
    }
    doc["inputs"] = std::move(in);
    json outp = json::object();
    for (const std::string& path : outputs) {
        char hex[24];
        std::snprintf(hex, sizeof(hex), "fnv1a:%016llx",
                      static_cast<unsigned long long>(fnv1a_file(path)));
        outp[path] = hex;
    }
    doc["outputs"] = std::move(outp);
    write_text_file(out_path(config, command + "_manifest.json"), doc.dump(2) + "\n");
}

void cmd_parse(const std::string& html_dir, const std::string& rules_path,
               const RunConfig& config) {
    parser::RuleTable rules = parser::load_rules(rules_path);

    std::vector<std::string> files;
    if (!fs::is_directory(html_dir)) {
        throw std::runtime_error("not a directory: " + html_dir);
    }
    for (const fs::directory_entry& entry : fs::directory_iterator(html_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        if (ext == ".html" || ext == ".htm") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "warning: no html files found in " << html_dir << "\n";
    }

    std::vector<parser::ParsedPage> pages;
    for (const std::string& file : files) {
        try {
            pages.push_back(parser::parse_listing_file(file, rules));
        } catch (const parser::ParseError& e) {
            throw parser::ParseError(file + ": " + e.what());
        }
    }

    std::string csv_path = out_path(config, "listings.csv");
    parser::export_csv(pages, csv_path);

    json report;
    report["parsed"] = pages.size();
    json entries = json::array();
    for (const parser::ParsedPage& page : pages) {
        json entry;
        entry["path"] = page.source_path;
        entry["missing_fields"] = page.missing_fields;
        entries.push_back(std::move(entry));
    }
    report["files"] = std::move(entries);
    std::string report_path = out_path(config, "parse_report.json");
    write_text_file(report_path, report.dump(2) + "\n");

    std::vector<std::string> inputs = files;
    inputs.push_back(rules_path);
    write_manifest("parse", config, inputs, {csv_path, report_path});
}

void cmd_clean(const std::string& in_csv, const RunConfig& config) {
    CleanRows rows = clean_rows(in_csv);
    if (rows.records.empty()) {
        throw std::runtime_error("no rows survive cleaning: " + in_csv);
    }
    CleanTable table;
    table.all = preprocess::build_dataset(rows.records);
    table.bucket_labels = rows.labels;
    std::string csv_path = out_path(config, "cleaned.csv");
    write_clean_csv(table, csv_path);

    json report;
    report["input_rows"] = rows.input_rows;
    report["load_rejected"] = rows.load_rejected;
    report["validation_rejected"] = rows.validation_rejected;
    report["outliers_dropped"] = rows.outliers_dropped;
    report["out_of_range_dropped"] = rows.out_of_range;
    report["output_rows"] = rows.records.size();
    report["missing_counts"] = rows.missing_counts;
    std::string report_path = out_path(config, "clean_report.json");
    write_text_file(report_path, report.dump(2) + "\n");

    write_manifest("clean", config, {in_csv}, {csv_path, report_path});
}

void cmd_stats(const std::string& in_csv, const RunConfig& config) {
    CleanRows rows = clean_rows(in_csv);
    if (rows.records.empty()) {
        throw std::runtime_error("no rows survive cleaning: " + in_csv);
    }
    dataset::PartitionResult partition = dataset::partition_by_year(rows.records);

    std::string stats_path = out_path(config, "stats.csv");
    preprocess::StatsTable stats = preprocess::summary_stats(partition.buckets);
    preprocess::write_stats_csv(stats, stats_path);

    Dataset ds = preprocess::build_dataset(rows.records);
    preprocess::CorrMatrix corr = preprocess::correlation_matrix(ds);
    std::string corr_path = out_path(config, "corr.csv");
    preprocess::write_corr_csv(corr, corr_path);

    write_manifest("stats", config, {in_csv}, {stats_path, corr_path});
}

void cmd_train(const std::string& clean_csv, const std::string& family_name,
               const models::HyperParams& params, const std::string& bucket_filter,
               const RunConfig& config) {
    std::optional<models::Family> family = models::family_from_name(family_name);
    if (!family) {
        std::string valid;
        for (models::Family f : models::all_families()) {
            if (!valid.empty()) valid += ", ";
            valid += models::family_name(f);
        }
        throw std::invalid_argument("unknown model: " + family_name + " (valid: " + valid + ")");
    }

    CleanTable table = read_clean_csv(clean_csv);
    Dataset ds;
    std::string suffix;
    if (bucket_filter.empty()) {
        ds = table.all;
    } else {
        if (!bucket_from_label(bucket_filter)) {
            throw std::invalid_argument("unknown bucket label: " + bucket_filter);
        }
        ds.feature_names = table.all.feature_names;
        for (size_t i = 0; i < table.all.n_rows(); ++i) {
            if (table.bucket_labels[i] != bucket_filter) continue;
            ds.rows.push_back(table.all.rows[i]);
            ds.target.push_back(table.all.target[i]);
        }
        if (ds.n_rows() == 0) {
            throw std::runtime_error("no rows in bucket " + bucket_filter);
        }
        suffix = "_" + bucket_filter;
    }

    models::Model model = models::fit_model(*family, params, ds, config.seed);
    std::string model_path = out_path(config, "model_" + family_name + suffix + ".json");
    models::save_model(model, model_path);
    write_manifest("train", config, {clean_csv}, {model_path});
}

void cmd_evaluate(const std::string& clean_csv, const RunConfig& config) {
    CleanTable table = read_clean_csv(clean_csv);
    std::map<YearBucket, Dataset> all = split_buckets(table);
    std::map<YearBucket, Dataset> use;
    for (YearBucket bucket : config.buckets) {
        auto it = all.find(bucket);
        if (it != all.end()) use[bucket] = std::move(it->second);
    }
    if (use.empty()) {
        throw std::runtime_error("no requested bucket has any rows in " + clean_csv);
    }

    eval::EvalConfig econfig;
    econfig.test_fraction = config.test_fraction;
    econfig.k_folds = config.k_folds;
    econfig.seed = config.seed;
    econfig.families = config.families;
    econfig.grids = config.grids;

    eval::EvalReport report = eval::evaluate_all(use, econfig);
    std::string results_path = out_path(config, "results.csv");
    eval::write_results_csv(report, results_path);
    std::string manifest_path = out_path(config, "eval_manifest.json");
    write_text_file(manifest_path, eval::eval_manifest_json(report, econfig.grids));

    write_manifest("evaluate", config, {clean_csv}, {results_path, manifest_path});
}

void cmd_explain(const std::string& clean_csv, const RunConfig& config) {
    CleanTable table = read_clean_csv(clean_csv);
    std::map<YearBucket, Dataset> all = split_buckets(table);

    std::string shap_csv = explain::kShapCsvHeader;
    std::string summary_csv = explain::kShapSummaryCsvHeader;
    bool any = false;
    for (YearBucket bucket : config.buckets) {
        auto it = all.find(bucket);
        if (it == all.end()) continue;
        any = true;
        const Dataset& ds = it->second;
        uint64_t ib = static_cast<uint64_t>(bucket);
        uint64_t fi = static_cast<uint64_t>(config.explain_family);

        eval::Split split =
            eval::train_test_split(ds, config.test_fraction, derive_seed(config.seed, ib));
        models::Model model = models::fit_model(config.explain_family, config.explain_params,
                                                split.train,
                                                derive_seed(config.seed, 64 + ib * 8 + fi));
        Dataset background = explain::sample_background(split.train, config.background_size,
                                                        derive_seed(config.seed, 128 + ib));
        size_t n_explain = std::min(config.explain_budget, split.test.n_rows());
        std::vector<size_t> head(n_explain);
        std::iota(head.begin(), head.end(), size_t{0});
        Dataset rows = split.test.subset(head);

        explain::ShapSummary summary = explain::shap_summary(model, rows, background);
        std::string label = dataset::bucket_label(bucket);
        explain::append_shap_rows(shap_csv, label, summary);
        explain::append_summary_rows(summary_csv, label, summary);
    }
    if (!any) throw std::runtime_error("no requested bucket has any rows in " + clean_csv);

    std::string shap_path = out_path(config, "shap.csv");
    write_text_file(shap_path, shap_csv);
    std::string summary_path = out_path(config, "shap_summary.csv");
    write_text_file(summary_path, summary_csv);
    write_manifest("explain", config, {clean_csv}, {shap_path, summary_path});
}

void cmd_report(const std::string& results_csv, const std::string& corr_csv,
                const std::string& shap_csv, const std::string& shap_summary_csv,
                const RunConfig& config) {
    csv::Table results = csv::read_file(results_csv);
    require_header(results, {"model", "bucket", "rmse", "mae", "r_squared"}, "results csv");

    preprocess::CorrMatrix corr = preprocess::read_corr_csv(corr_csv);
    std::string heatmap_path = out_path(config, "heatmap.svg");
    write_text_file(heatmap_path, svg::heatmap_svg(corr));

    csv::Table shap = csv::read_file(shap_csv);
    require_header(shap, {"bucket", "row", "feature", "value", "phi"}, "shap csv");
    csv::Table summary = csv::read_file(shap_summary_csv);
    require_header(summary, {"bucket", "rank", "feature", "mean_abs_phi"}, "shap summary csv");

    // bucket -> feature -> points, insertion order preserved separately
    std::map<std::string, std::map<std::string, std::vector<explain::FeaturePoint>>> points;
    for (size_t r = 1; r < shap.rows.size(); ++r) {
        const std::vector<std::string>& row = shap.rows[r];
        if (row.size() != 5) {
            throw std::invalid_argument("shap csv: row " + std::to_string(r) + " malformed");
        }
        points[row[0]][row[2]].push_back(
            {cell_number(row[3], "shap csv"), cell_number(row[4], "shap csv")});
    }

    std::vector<std::string> bucket_order;
    std::map<std::string, std::vector<std::pair<std::string, double>>> ranked;
    for (size_t r = 1; r < summary.rows.size(); ++r) {
        const std::vector<std::string>& row = summary.rows[r];
        if (row.size() != 4) {
            throw std::invalid_argument("shap summary csv: row " + std::to_string(r) + " malformed");
        }
        if (!ranked.count(row[0])) bucket_order.push_back(row[0]);
        ranked[row[0]].push_back({row[2], cell_number(row[3], "shap summary csv")});
    }

    std::vector<std::string> svg_paths;
    for (const std::string& bucket : bucket_order) {
        auto bucket_points = points.find(bucket);
        if (bucket_points == points.end()) {
            throw std::invalid_argument("shap csv has no rows for bucket " + bucket);
        }
        std::vector<svg::BeeswarmRow> rows;
        for (const auto& [feature, mean_abs] : ranked[bucket]) {
            (void)mean_abs;
            auto feature_points = bucket_points->second.find(feature);
            if (feature_points == bucket_points->second.end()) {
                throw std::invalid_argument("shap csv missing feature " + feature + " for bucket " +
                                            bucket);
            }
            rows.push_back({feature, feature_points->second});
        }
        std::string path = out_path(config, "shap_" + bucket + ".svg");
        write_text_file(path, svg::beeswarm_svg("shap summary " + bucket, rows));
        svg_paths.push_back(path);
    }

    // Plain-text digest of the grid plus each bucket's strongest features.
    std::string text = "model performance\n=================\n";
    text += "model      bucket     rmse             mae              r_squared\n";
    for (size_t r = 1; r < results.rows.size(); ++r) {
        const std::vector<std::string>& row = results.rows[r];
        if (row.size() != 5) {
            throw std::invalid_argument("results csv: row " + std::to_string(r) + " malformed");
        }
        char line[160];
        std::snprintf(line, sizeof(line), "%-10s %-10s %-16s %-16s %s\n", row[0].c_str(),
                      row[1].c_str(), row[2].c_str(), row[3].c_str(),
                      row[4].empty() ? "undefined" : row[4].c_str());
        text += line;
    }
    text += "\ntop features by mean |shap|\n===========================\n";
    for (const std::string& bucket : bucket_order) {
        text += bucket + ":";
        const auto& list = ranked[bucket];
        for (size_t i = 0; i < list.size() && i < 5; ++i) {
            text += (i == 0 ? " " : ", ") + list[i].first;
        }
        text += "\n";
    }
    std::string text_path = out_path(config, "summary.txt");
    write_text_file(text_path, text);

    std::vector<std::string> outputs = {heatmap_path};
    outputs.insert(outputs.end(), svg_paths.begin(), svg_paths.end());
    outputs.push_back(text_path);
    write_manifest("report", config, {results_csv, corr_csv, shap_csv, shap_summary_csv}, outputs);
}

}  // namespace hpml::pipeline

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hpml/dataset.hpp"
#include "hpml/models/io.hpp"
#include "hpml/parser.hpp"
#include "hpml/pipeline.hpp"

namespace {

using hpml::pipeline::RunConfig;

hpml::models::HyperParams parse_params(const std::vector<std::string>& pairs) {
    hpml::models::HyperParams hp;
    for (const std::string& pair : pairs) {
        size_t eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::invalid_argument("bad --param, want key=value: " + pair);
        }
        std::string key = pair.substr(0, eq);
        std::string value = pair.substr(eq + 1);
        try {
            size_t used = 0;
            double number = std::stod(value, &used);
            if (used == value.size()) {
                hp[key] = number;
                continue;
            }
        } catch (const std::exception&) {
        }
        hp[key] = value;
    }
    return hp;
}

int error_exit(const char* code, const std::string& what) {
    std::cerr << "error: " << code << ": " << what << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"housing price modeling pipeline"};
    app.require_subcommand(1);
    // lets --seed/--out/--config appear after the subcommand too
    app.fallthrough();

    uint64_t seed = 0;
    std::string out_dir = ".";
    std::string config_path;
    app.add_option("--seed", seed, "random seed for every stochastic step");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--config", config_path, "JSON run configuration");

    std::string html_dir;
    std::string rules_path;
    CLI::App* parse = app.add_subcommand("parse", "extract listings from saved html pages");
    parse->add_option("--html", html_dir, "directory of saved listing pages")->required();
    parse->add_option("--rules", rules_path, "extraction rule table (json)")->required();

    std::string clean_in;
    CLI::App* clean = app.add_subcommand("clean", "validate, filter, and encode listings");
    clean->add_option("--in", clean_in, "listings csv from parse")->required();

    std::string stats_in;
    CLI::App* stats = app.add_subcommand("stats", "summary statistics and correlations");
    stats->add_option("--in", stats_in, "listings csv from parse")->required();

    std::string train_in;
    std::string train_model;
    std::string train_bucket;
    std::vector<std::string> train_params;
    CLI::App* train = app.add_subcommand("train", "fit one model on the cleaned table");
    train->add_option("--in", train_in, "cleaned csv from clean")->required();
    train->add_option("--model", train_model, "model family")->required();
    train->add_option("--bucket", train_bucket, "restrict to one year bucket");
    train->add_option("--param", train_params, "hyperparameter key=value (repeatable)");

    std::string eval_in;
    std::string grids_path;
    CLI::App* evaluate = app.add_subcommand("evaluate", "grid-search and score every family");
    evaluate->add_option("--in", eval_in, "cleaned csv from clean")->required();
    evaluate->add_option("--grids", grids_path, "tuning grids (json)");

    std::string explain_in;
    CLI::App* explain = app.add_subcommand("explain", "shapley attributions per bucket");
    explain->add_option("--in", explain_in, "cleaned csv from clean")->required();

    std::string report_results;
    std::string report_corr;
    std::string report_shap;
    std::string report_summary;
    CLI::App* report = app.add_subcommand("report", "render svg figures and a text digest");
    report->add_option("--results", report_results, "results csv from evaluate")->required();
    report->add_option("--corr", report_corr, "correlation csv from stats")->required();
    report->add_option("--shap", report_shap, "shap csv from explain")->required();
    report->add_option("--shap-summary", report_summary, "shap summary csv from explain")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config;
        if (!config_path.empty()) hpml::pipeline::apply_config_file(config, config_path);
        if (app.count("--seed") > 0) config.seed = seed;
        config.out_dir = out_dir;
        if (!grids_path.empty()) {
            auto grids = hpml::eval::load_grids(grids_path);
            for (auto& [family, grid] : grids) config.grids[family] = std::move(grid);
        }

        if (parse->parsed()) {
            hpml::pipeline::cmd_parse(html_dir, rules_path, config);
        } else if (clean->parsed()) {
            hpml::pipeline::cmd_clean(clean_in, config);
        } else if (stats->parsed()) {
            hpml::pipeline::cmd_stats(stats_in, config);
        } else if (train->parsed()) {
            hpml::pipeline::cmd_train(train_in, train_model, parse_params(train_params),
                                      train_bucket, config);
        } else if (evaluate->parsed()) {
            hpml::pipeline::cmd_evaluate(eval_in, config);
        } else if (explain->parsed()) {
            hpml::pipeline::cmd_explain(explain_in, config);
        } else if (report->parsed()) {
            hpml::pipeline::cmd_report(report_results, report_corr, report_shap, report_summary,
                                       config);
        }
    } catch (const hpml::dataset::SchemaError& e) {
        return error_exit("E_SCHEMA", e.what());
    } catch (const hpml::dataset::LoadError& e) {
        return error_exit("E_IO", e.what());
    } catch (const hpml::parser::RulesError& e) {
        return error_exit("E_RULES", e.what());
    } catch (const hpml::parser::ParseError& e) {
        return error_exit("E_PARSE", e.what());
    } catch (const hpml::models::ParamError& e) {
        return error_exit("E_PARAMS", e.what());
    } catch (const hpml::models::ModelIoError& e) {
        return error_exit("E_MODEL_IO", e.what());
    } catch (const std::invalid_argument& e) {
        return error_exit("E_CONFIG", e.what());
    } catch (const std::exception& e) {
        return error_exit("E_RUNTIME", e.what());
    }
    return 0;
}

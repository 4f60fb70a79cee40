#include "doctest.h"
#include "helpers.hpp"
#include "hpml/models/io.hpp"
#include "json.hpp"

using namespace hpml;
using namespace hpml::models;

namespace {

Model fitted(Family family, const Dataset& ds) {
    HyperParams hp;
    switch (family) {
        case Family::svr:
            hp["C"] = 10.0;
            hp["epsilon"] = 0.1;
            break;
        case Family::forest:
            hp["n_trees"] = 8.0;
            break;
        case Family::gbt:
            hp["n_rounds"] = 15.0;
            hp["max_depth"] = 3.0;
            hp["subsample"] = 0.7;
            break;
        default:
            break;
    }
    return fit_model(family, hp, ds, 17);
}

}  // namespace

TEST_CASE("models round-trip through json with bit-identical predictions") {
    Dataset ds = test_helpers::random_dataset(60, 4, 9);
    test_helpers::TempDir tmp("model_io");

    for (Family family : all_families()) {
        INFO("family ", family_name(family));
        Model model = fitted(family, ds);

        std::string text = model_to_json(model);
        Model back = model_from_json(text);
        CHECK(model_family(back) == family);
        CHECK(model_n_features(back) == 4);
        for (size_t i = 0; i < ds.n_rows(); ++i) {
            CHECK(predict(back, ds.rows[i]) == predict(model, ds.rows[i]));
        }
        CHECK(model_to_json(back) == text);

        std::string path = tmp.path(family_name(family) + ".json");
        save_model(model, path);
        Model loaded = load_model(path);
        for (size_t i = 0; i < 10; ++i) {
            CHECK(predict(loaded, ds.rows[i]) == predict(model, ds.rows[i]));
        }
    }
}

TEST_CASE("model json carries the schema header and family params") {
    Dataset ds = test_helpers::random_dataset(30, 3, 4);
    Model model = fitted(Family::gbt, ds);
    nlohmann::json doc = nlohmann::json::parse(model_to_json(model));
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["model_kind"] == "gbt");
    CHECK(doc["params"]["n_rounds"] == 15);
    CHECK(doc["params"]["subsample"] == 0.7);
    CHECK(doc["payload"]["trees"].is_array());
    CHECK(doc["payload"]["base_score"].is_number());

    Model svr = fitted(Family::svr, ds);
    nlohmann::json sdoc = nlohmann::json::parse(model_to_json(svr));
    CHECK(sdoc["model_kind"] == "svr");
    CHECK(sdoc["params"]["kernel"] == "rbf");
    CHECK(sdoc["payload"]["support_rows"].is_array());
}

TEST_CASE("malformed model files fail with specific errors") {
    Dataset ds = test_helpers::random_dataset(20, 2, 2);
    std::string text = model_to_json(fitted(Family::tree, ds));

    CHECK_THROWS_WITH_AS(model_from_json(text.substr(0, text.size() / 2)),
                         doctest::Contains("truncated or corrupt"), ModelIoError);
    CHECK_THROWS_WITH_AS(model_from_json(R"({"schema_version": 1, "model_kind": "tree"})"),
                         doctest::Contains("top-level"), ModelIoError);

    nlohmann::json doc = nlohmann::json::parse(text);
    doc["schema_version"] = 9;
    CHECK_THROWS_WITH_AS(model_from_json(doc.dump()), doctest::Contains("schema_version"),
                         ModelIoError);

    doc["schema_version"] = 1;
    doc["model_kind"] = "perceptron";
    CHECK_THROWS_WITH_AS(model_from_json(doc.dump()), doctest::Contains("perceptron"),
                         ModelIoError);

    nlohmann::json svr = nlohmann::json::parse(model_to_json(fitted(Family::svr, ds)));
    svr["params"]["kernel"] = "sigmoid";
    CHECK_THROWS_WITH_AS(model_from_json(svr.dump()), doctest::Contains("sigmoid"), ModelIoError);

    CHECK_THROWS_AS(load_model("/no/such/model.json"), ModelIoError);
}

TEST_CASE("fit_model validates family hyperparameters") {
    Dataset ds = test_helpers::random_dataset(25, 3, 6);
    CHECK_THROWS_AS(fit_model(Family::tree, {{"depth", 3.0}}, ds, 0), ParamError);
    CHECK_THROWS_AS(fit_model(Family::tree, {{"max_depth", std::string("deep")}}, ds, 0),
                    ParamError);
    CHECK_THROWS_AS(fit_model(Family::gbt, {{"n_rounds", -1.0}}, ds, 0), ParamError);
    CHECK_THROWS_AS(fit_model(Family::svr, {{"kernel", std::string("sigmoid")}}, ds, 0),
                    ParamError);
    CHECK_THROWS_AS(fit_model(Family::forest, {{"n_trees", 0.0}}, ds, 0), ParamError);
}

TEST_CASE("predict_all matches per-row predict") {
    Dataset ds = test_helpers::random_dataset(40, 3, 12);
    Model model = fitted(Family::forest, ds);
    std::vector<double> all = predict_all(model, ds);
    REQUIRE(all.size() == ds.n_rows());
    for (size_t i = 0; i < ds.n_rows(); ++i) CHECK(all[i] == predict(model, ds.rows[i]));
}

TEST_CASE("family names map both ways") {
    for (Family f : all_families()) {
        auto parsed = family_from_name(family_name(f));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == f);
    }
    CHECK_FALSE(family_from_name("boosted").has_value());
    CHECK(family_name(Family::gbt) == "gbt");
    CHECK(all_families().size() == 5);
}

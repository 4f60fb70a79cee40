#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "oracle_svr.hpp"
#include "hpml/models/svr.hpp"

using namespace hpml;
using namespace hpml::models;


TEST_CASE("kernel_eval matches the closed-form kernels") {
    SvrKernel k;
    std::vector<double> u = {1.0, 2.0, -1.0};
    std::vector<double> v = {0.5, -1.0, 2.0};

    k.type = KernelType::linear;
    CHECK(kernel_eval(k, u, v) == doctest::Approx(0.5 - 2.0 - 2.0));

    k.type = KernelType::rbf;
    k.gamma = 0.25;
    double d2 = 0.25 + 9.0 + 9.0;
    CHECK(kernel_eval(k, u, v) == doctest::Approx(std::exp(-0.25 * d2)));
    CHECK(kernel_eval(k, u, u) == 1.0);

    k.type = KernelType::polynomial;
    k.gamma = 0.5;
    k.degree = 3;
    k.coef0 = 1.0;
    CHECK(kernel_eval(k, u, v) == doctest::Approx(std::pow(0.5 * -3.5 + 1.0, 3)));
}

TEST_CASE("smo dual reaches the projected-gradient optimum") {
    int instances = 0;
    for (uint64_t seed = 1; instances < 20; ++seed) {
        Rng rng(seed * 7919);
        size_t n = 4 + rng.index(9);  // 4..12 rows
        size_t m = 1 + rng.index(3);
        Dataset ds;
        for (size_t j = 0; j < m; ++j) ds.feature_names.push_back("f" + std::to_string(j));
        for (size_t i = 0; i < n; ++i) {
            std::vector<double> row(m);
            for (size_t j = 0; j < m; ++j) row[j] = rng.next_double() * 4.0 - 2.0;
            double y = std::sin(row[0] * 2.0) + 0.5 * row[m - 1] + rng.next_double() * 0.2;
            ds.rows.push_back(std::move(row));
            ds.target.push_back(y * 100.0 + 300.0);
        }

        SvrParams params;
        params.kernel = seed % 3 == 0   ? KernelType::linear
                        : seed % 3 == 1 ? KernelType::rbf
                                        : KernelType::polynomial;
        params.degree = 2;
        params.C = seed % 2 == 0 ? 2.0 : 8.0;
        params.epsilon = 10.0;  // dollars; a fraction of the target std
        params.tol = 1e-7;
        params.max_passes = 20000;

        SvrModel model = fit_svr(ds, params);
        REQUIRE(model.converged);

        oracle_svr::DualGap gap = oracle_svr::dual_gap(ds, model, params);
        INFO("seed ", seed, " n ", n, " m ", m, " kernel ", kernel_name(params.kernel));
        CHECK(gap.f_model <= gap.f_ref + 1e-4 * (1.0 + std::abs(gap.f_ref)));
        // The model point is feasible, so it can never beat the optimum by
        // more than the reference's own residual error.
        CHECK(gap.f_model >= gap.f_ref - 1e-5 * (1.0 + std::abs(gap.f_ref)));
        ++instances;
    }
}

TEST_CASE("constant targets give an exactly flat svr") {
    Dataset ds = test_helpers::random_dataset(15, 2, 71);
    for (double& y : ds.target) y = 250000.0;
    SvrParams params;
    params.epsilon = 100.0;
    SvrModel model = fit_svr(ds, params);
    CHECK(model.converged);
    CHECK(model.support_rows.empty());
    CHECK(model.predict(ds.rows[3]) == 250000.0);
    CHECK(model.predict(std::vector<double>{9.0, -9.0}) == 250000.0);
}

TEST_CASE("linear-kernel svr recovers a linear trend within the tube") {
    Rng rng(5);
    Dataset ds;
    ds.feature_names = {"x"};
    for (int i = 0; i < 30; ++i) {
        double x = double(i) - 15.0;
        ds.rows.push_back({x});
        ds.target.push_back(3.0 * x + 20.0);
    }
    SvrParams params;
    params.kernel = KernelType::linear;
    params.C = 100.0;
    params.epsilon = 0.5;
    params.tol = 1e-6;
    params.max_passes = 5000;
    SvrModel model = fit_svr(ds, params);
    REQUIRE(model.converged);
    for (size_t i = 0; i < ds.n_rows(); ++i)
        CHECK(std::abs(model.predict(ds.rows[i]) - ds.target[i]) <= 0.5 + 1e-6);
}

TEST_CASE("dual coefficients respect the box and the balance constraint") {
    Dataset ds = test_helpers::random_dataset(25, 3, 91);
    SvrParams params;
    params.C = 5.0;
    params.epsilon = 0.5;
    params.tol = 1e-6;
    params.max_passes = 5000;
    SvrModel model = fit_svr(ds, params);
    double sum = 0;
    for (double b : model.dual_coefficients) {
        CHECK(std::abs(b) <= params.C + 1e-12);
        sum += b;
    }
    CHECK(std::abs(sum) < 1e-9);
}

TEST_CASE("fit_svr validates its parameters") {
    Dataset ds = test_helpers::random_dataset(10, 2, 3);
    SvrParams params;
    params.C = 0.0;
    CHECK_THROWS_AS(fit_svr(ds, params), ParamError);
    params.C = 1.0;
    params.epsilon = -1.0;
    CHECK_THROWS_AS(fit_svr(ds, params), ParamError);
    CHECK_THROWS_AS(fit_svr(Dataset{}, SvrParams{}), std::invalid_argument);
}

#include "hpml/models/svr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hpml::models {

double kernel_eval(const SvrKernel& kernel, std::span<const double> u, std::span<const double> v) {
    switch (kernel.type) {
        case KernelType::linear: {
            double dot = 0;
            for (size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
            return dot;
        }
        case KernelType::rbf: {
            double dist2 = 0;
            for (size_t i = 0; i < u.size(); ++i) {
                double d = u[i] - v[i];
                dist2 += d * d;
            }
            return std::exp(-kernel.gamma * dist2);
        }
        case KernelType::polynomial: {
            double dot = 0;
            for (size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
            return std::pow(kernel.gamma * dot + kernel.coef0, kernel.degree);
        }
    }
    return 0.0;
}

double SvrModel::predict(std::span<const double> row) const {
    if (row.size() != n_features)
        throw std::invalid_argument("svr predict: feature count mismatch");
    std::vector<double> z(n_features);
    for (size_t j = 0; j < n_features; ++j)
        z[j] = (row[j] - feature_mean[j]) / feature_std[j];
    double f = intercept;
    for (size_t k = 0; k < support_rows.size(); ++k)
        f += dual_coefficients[k] * kernel_eval(kernel, support_rows[k], z);
    return f * target_std + target_mean;
}

namespace {

struct Standardized {
    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    std::vector<double> feature_mean, feature_std;
    double target_mean = 0.0, target_std = 1.0;
};

Standardized standardize(const Dataset& ds) {
    const size_t n = ds.n_rows();
    const size_t m = ds.n_features();
    Standardized s;
    s.feature_mean.assign(m, 0.0);
    s.feature_std.assign(m, 0.0);
    for (const auto& row : ds.rows)
        for (size_t j = 0; j < m; ++j) s.feature_mean[j] += row[j];
    for (size_t j = 0; j < m; ++j) s.feature_mean[j] /= static_cast<double>(n);
    for (const auto& row : ds.rows)
        for (size_t j = 0; j < m; ++j) {
            double d = row[j] - s.feature_mean[j];
            s.feature_std[j] += d * d;
        }
    for (size_t j = 0; j < m; ++j) {
        s.feature_std[j] = std::sqrt(s.feature_std[j] / static_cast<double>(n));
        if (s.feature_std[j] == 0.0) s.feature_std[j] = 1.0;
    }

    for (double y : ds.target) s.target_mean += y;
    s.target_mean /= static_cast<double>(n);
    double var = 0;
    for (double y : ds.target) {
        double d = y - s.target_mean;
        var += d * d;
    }
    s.target_std = std::sqrt(var / static_cast<double>(n));
    if (s.target_std == 0.0) s.target_std = 1.0;

    s.rows.assign(n, std::vector<double>(m));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j)
            s.rows[i][j] = (ds.rows[i][j] - s.feature_mean[j]) / s.feature_std[j];
    s.targets.resize(n);
    for (size_t i = 0; i < n; ++i) s.targets[i] = (ds.target[i] - s.target_mean) / s.target_std;
    return s;
}

}  // namespace

SvrModel fit_svr(const Dataset& train, const SvrParams& params) {
    if (train.n_rows() == 0) throw std::invalid_argument("fit_svr: empty dataset");
    train.check();
    if (params.C <= 0) throw ParamError("C must be positive");
    if (params.epsilon < 0) throw ParamError("epsilon must be non-negative");

    const size_t n = train.n_rows();
    const size_t m = train.n_features();

    Standardized data = standardize(train);

    SvrModel model;
    model.kernel.type = params.kernel;
    model.kernel.gamma = params.gamma > 0 ? params.gamma : 1.0 / static_cast<double>(m);
    model.kernel.degree = params.degree;
    model.kernel.coef0 = params.coef0;
    model.epsilon = params.epsilon;
    model.C = params.C;
    model.feature_mean = data.feature_mean;
    model.feature_std = data.feature_std;
    model.target_mean = data.target_mean;
    model.target_std = data.target_std;
    model.n_features = m;

    const double C = params.C;
    const double eps = params.epsilon / data.target_std;

    // Kernel matrix over standardized rows.
    std::vector<std::vector<double>> K(n, std::vector<double>(n));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i; j < n; ++j) {
            double k = kernel_eval(model.kernel, data.rows[i], data.rows[j]);
            K[i][j] = k;
            K[j][i] = k;
        }
    }

    // Dual in 2n box variables t: a < n holds alpha (sign +1), a >= n
    // holds alpha* (sign -1); beta_i = t[i] - t[i+n]. The gradient of
    //   1/2 sum s_a s_b t_a t_b K + sum (eps - s_a y_a) t_a
    // is maintained incrementally.
    const size_t nn = 2 * n;
    std::vector<double> t(nn, 0.0);
    std::vector<double> grad(nn);
    for (size_t a = 0; a < nn; ++a) {
        double sign = a < n ? 1.0 : -1.0;
        grad[a] = eps - sign * data.targets[a % n];
    }
    auto sign_of = [n](size_t a) { return a < n ? 1.0 : -1.0; };

    const long max_iterations = static_cast<long>(params.max_passes) * static_cast<long>(n);
    double m_up = 0.0, m_low = 0.0;
    bool converged = false;

    for (long iter = 0;; ++iter) {
        // Maximal violating pair.
        size_t best_i = nn, best_j = nn;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (size_t a = 0; a < nn; ++a) {
            double s = sign_of(a);
            double v = -s * grad[a];
            bool can_up = s > 0 ? t[a] < C : t[a] > 0;
            bool can_down = s > 0 ? t[a] > 0 : t[a] < C;
            if (can_up && v > m_up) {
                m_up = v;
                best_i = a;
            }
            if (can_down && v < m_low) {
                m_low = v;
                best_j = a;
            }
        }
        if (best_i == nn || best_j == nn || m_up - m_low < params.tol) {
            converged = true;
            break;
        }
        if (iter >= max_iterations) break;

        const size_t i = best_i, j = best_j;
        const size_t ri = i % n, rj = j % n;
        const double si = sign_of(i), sj = sign_of(j);

        double q = K[ri][ri] + K[rj][rj] - 2.0 * K[ri][rj];
        if (q < 1e-12) q = 1e-12;
        double delta = (m_up - m_low) / q;

        double room_i = si > 0 ? C - t[i] : t[i];
        double room_j = sj > 0 ? t[j] : C - t[j];
        double step = std::min({delta, room_i, room_j});
        if (step <= 0) break;

        // Move i "up" and j "down" along the equality constraint; land
        // exactly on the box when the step is clipped.
        if (step == room_i)
            t[i] = si > 0 ? C : 0.0;
        else
            t[i] += si > 0 ? step : -step;
        if (step == room_j)
            t[j] = sj > 0 ? 0.0 : C;
        else
            t[j] += sj > 0 ? -step : step;

        for (size_t a = 0; a < nn; ++a)
            grad[a] += sign_of(a) * step * (K[a % n][ri] - K[a % n][rj]);
    }

    model.converged = converged;
    model.intercept = (m_up + m_low) / 2.0;
    if (!std::isfinite(model.intercept)) model.intercept = 0.0;

    for (size_t i = 0; i < n; ++i) {
        double beta = t[i] - t[i + n];
        if (beta != 0.0) {
            model.dual_coefficients.push_back(beta);
            model.support_rows.push_back(data.rows[i]);
            model.support_indices.push_back(i);
        }
    }
    return model;
}

}  // namespace hpml::models

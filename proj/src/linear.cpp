#include "hpml/models/linear.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hpml::models {

namespace {

// Column-major matrix: cols[j] is column j.
using Columns = std::vector<std::vector<double>>;

double column_tail_norm2(const std::vector<double>& col, size_t from) {
    double s = 0;
    for (size_t i = from; i < col.size(); ++i) s += col[i] * col[i];
    return s;
}

// Householder vector for x = col[from:]; reflects x onto +-||x|| e1.
// Returns beta = 2 / v'v with v stored back into col[from:] (v[0] = 1
// implied); the diagonal result is written to diag.
double make_householder(std::vector<double>& col, size_t from, double& diag) {
    double norm2 = column_tail_norm2(col, from);
    double norm = std::sqrt(norm2);
    if (norm == 0.0) {
        diag = 0.0;
        return 0.0;
    }
    double alpha = col[from] >= 0 ? -norm : norm;  // sign avoids cancellation
    double v0 = col[from] - alpha;
    diag = alpha;
    // v = (v0, x_rest); normalize so the stored head is v0, beta uses v'v.
    double vtv = norm2 - col[from] * col[from] + v0 * v0;
    col[from] = v0;
    return vtv == 0.0 ? 0.0 : 2.0 / vtv;
}

void apply_householder(const std::vector<double>& v, size_t from, double beta,
                       std::vector<double>& target) {
    if (beta == 0.0) return;
    double dot = 0;
    for (size_t i = from; i < v.size(); ++i) dot += v[i] * target[i];
    dot *= beta;
    for (size_t i = from; i < v.size(); ++i) target[i] -= dot * v[i];
}

// Minimum-norm solution of the dense least-squares system cols * x ~= rhs.
std::vector<double> solve_min_norm(Columns cols, std::vector<double> rhs) {
    const size_t n = rhs.size();
    const size_t m = cols.size();
    const size_t steps = std::min(n, m);

    std::vector<size_t> perm(m);
    for (size_t j = 0; j < m; ++j) perm[j] = j;
    std::vector<double> diag(steps, 0.0);
    std::vector<double> betas(steps, 0.0);

    for (size_t k = 0; k < steps; ++k) {
        size_t pivot = k;
        double best = column_tail_norm2(cols[k], k);
        for (size_t j = k + 1; j < m; ++j) {
            double norm2 = column_tail_norm2(cols[j], k);
            if (norm2 > best) {
                best = norm2;
                pivot = j;
            }
        }
        std::swap(cols[k], cols[pivot]);
        std::swap(perm[k], perm[pivot]);

        betas[k] = make_householder(cols[k], k, diag[k]);
        for (size_t j = k + 1; j < m; ++j) apply_householder(cols[k], k, betas[k], cols[j]);
        apply_householder(cols[k], k, betas[k], rhs);
    }

    // Numerical rank from the pivoted diagonal.
    double tol = std::abs(diag.empty() ? 0.0 : diag[0]) *
                 static_cast<double>(std::max(n, m)) * std::numeric_limits<double>::epsilon();
    size_t rank = 0;
    while (rank < steps && std::abs(diag[rank]) > tol) ++rank;

    std::vector<double> z(m, 0.0);
    if (rank == 0) return z;

    if (rank == m) {
        // Full column rank: plain back substitution on R.
        for (size_t i = rank; i-- > 0;) {
            double s = rhs[i];
            for (size_t j = i + 1; j < rank; ++j) s -= cols[j][i] * z[j];
            z[i] = s / diag[i];
        }
    } else {
        // Complete the decomposition: QR of R1' (m x rank) gives
        // R1 = R2' Q2', and the minimum-norm z = Q2 * solve(R2', c).
        Columns rt(rank, std::vector<double>(m, 0.0));
        for (size_t i = 0; i < rank; ++i) {
            rt[i][i] = diag[i];
            for (size_t j = i + 1; j < m; ++j) rt[i][j] = cols[j][i];
        }
        std::vector<double> diag2(rank, 0.0);
        std::vector<double> betas2(rank, 0.0);
        for (size_t k = 0; k < rank; ++k) {
            betas2[k] = make_householder(rt[k], k, diag2[k]);
            for (size_t j = k + 1; j < rank; ++j) apply_householder(rt[k], k, betas2[k], rt[j]);
        }
        // Forward substitution on R2' w = c.
        std::vector<double> w(rank, 0.0);
        for (size_t i = 0; i < rank; ++i) {
            double s = rhs[i];
            for (size_t j = 0; j < i; ++j) s -= rt[i][j] * w[j];
            w[i] = s / diag2[i];
        }
        // z = Q2 w: apply the stored reflectors in reverse order.
        for (size_t i = 0; i < rank; ++i) z[i] = w[i];
        for (size_t k = rank; k-- > 0;) apply_householder(rt[k], k, betas2[k], z);
    }

    std::vector<double> x(m, 0.0);
    for (size_t j = 0; j < m; ++j) x[perm[j]] = z[j];
    return x;
}

}  // namespace

double LinearModel::predict(std::span<const double> row) const {
    if (row.size() != coefficients.size())
        throw std::invalid_argument("linear predict: feature count mismatch");
    double y = intercept;
    for (size_t j = 0; j < row.size(); ++j) y += coefficients[j] * row[j];
    return y;
}

LinearModel fit_linear(const Dataset& train) {
    if (train.n_rows() == 0) throw std::invalid_argument("fit_linear: empty dataset");
    train.check();

    const size_t n = train.n_rows();
    const size_t m = train.n_features();

    Columns cols(m + 1, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) cols[j][i] = train.rows[i][j];
        cols[m][i] = 1.0;  // intercept column
    }

    std::vector<double> x = solve_min_norm(std::move(cols), train.target);

    LinearModel model;
    model.coefficients.assign(x.begin(), x.begin() + m);
    model.intercept = x[m];
    return model;
}

}  // namespace hpml::models

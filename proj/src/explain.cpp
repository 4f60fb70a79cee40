#include "hpml/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <set>
#include <stdexcept>
#include <thread>

#include "hpml/csv.hpp"
#include "hpml/rng.hpp"

namespace hpml::explain {

namespace {

constexpr size_t kMaxFeatures = 25;

void collect_tree_features(const std::vector<models::TreeNode>& nodes, std::set<size_t>& out) {
    for (const models::TreeNode& node : nodes) {
        if (!node.is_leaf()) out.insert(static_cast<size_t>(node.feature));
    }
}

struct ActiveVisitor {
    size_t n_features;
    std::set<size_t> out;

    void operator()(const models::LinearModel& m) {
        for (size_t j = 0; j < m.coefficients.size(); ++j) {
            if (m.coefficients[j] != 0.0) out.insert(j);
        }
    }
    void operator()(const models::SvrModel&) {
        for (size_t j = 0; j < n_features; ++j) out.insert(j);
    }
    void operator()(const models::DecisionTree& m) { collect_tree_features(m.nodes, out); }
    void operator()(const models::RandomForest& m) {
        for (const models::DecisionTree& tree : m.trees) collect_tree_features(tree.nodes, out);
    }
    void operator()(const models::BoostedEnsemble& m) {
        for (const std::vector<models::TreeNode>& nodes : m.trees) collect_tree_features(nodes, out);
    }
};

// C(m-1, s) for s = 0..m-1; exact in doubles at this scale (m <= 25).
std::vector<double> binomial_row(size_t m_minus_1) {
    std::vector<double> row(m_minus_1 + 1, 1.0);
    for (size_t s = 1; s <= m_minus_1; ++s) {
        row[s] = row[s - 1] * static_cast<double>(m_minus_1 - s + 1) / static_cast<double>(s);
        row[s] = std::round(row[s]);
    }
    return row;
}

}  // namespace

std::vector<size_t> active_features(const models::Model& model, size_t n_features) {
    ActiveVisitor visitor{n_features, {}};
    std::visit(visitor, model);
    return std::vector<size_t>(visitor.out.begin(), visitor.out.end());
}

ShapExplanation exact_shap(const models::Model& model, std::span<const double> row,
                           const Dataset& background) {
    size_t m_total = row.size();
    if (background.n_rows() == 0) throw std::invalid_argument("exact_shap: empty background");
    if (background.n_features() != m_total) {
        throw std::invalid_argument("exact_shap: background feature count mismatch");
    }
    if (models::model_n_features(model) != m_total) {
        throw std::invalid_argument("exact_shap: model feature count mismatch");
    }
    if (m_total > kMaxFeatures) {
        throw std::invalid_argument("exact_shap: more than 25 features, enumeration too large");
    }

    std::vector<size_t> active = active_features(model, m_total);
    size_t m = active.size();

    ShapExplanation out;
    out.feature_names = background.feature_names;
    out.phi.assign(m_total, 0.0);
    out.prediction = models::predict(model, row);

    size_t n_bg = background.n_rows();
    std::vector<double> value(size_t{1} << m, 0.0);
    std::vector<double> composite;
    for (size_t mask = 0; mask < value.size(); ++mask) {
        double sum = 0.0;
        for (size_t b = 0; b < n_bg; ++b) {
            composite = background.rows[b];
            for (size_t j = 0; j < m; ++j) {
                if (mask & (size_t{1} << j)) composite[active[j]] = row[active[j]];
            }
            sum += models::predict(model, composite);
        }
        value[mask] = sum / static_cast<double>(n_bg);
    }
    out.base_value = value[0];
    if (m == 0) return out;

    std::vector<double> choose = binomial_row(m - 1);
    std::vector<double> weight(m, 0.0);
    for (size_t s = 0; s < m; ++s) weight[s] = 1.0 / (static_cast<double>(m) * choose[s]);

    for (size_t j = 0; j < m; ++j) {
        size_t bit = size_t{1} << j;
        double phi = 0.0;
        for (size_t mask = 0; mask < value.size(); ++mask) {
            if (mask & bit) continue;
            size_t s = static_cast<size_t>(std::popcount(mask));
            phi += weight[s] * (value[mask | bit] - value[mask]);
        }
        out.phi[active[j]] = phi;
    }
    return out;
}

ShapSummary shap_summary(const models::Model& model, const Dataset& rows,
                         const Dataset& background) {
    if (rows.n_features() != background.n_features()) {
        throw std::invalid_argument("shap_summary: feature count mismatch");
    }
    size_t n = rows.n_rows();
    size_t m = rows.n_features();
    std::vector<ShapExplanation> explained(n);

    size_t workers = std::min<size_t>(std::thread::hardware_concurrency(), n);
    if (workers <= 1 || n < 4) {
        for (size_t i = 0; i < n; ++i) explained[i] = exact_shap(model, rows.rows[i], background);
    } else {
        std::vector<std::future<void>> futures;
        futures.reserve(workers);
        for (size_t w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&, w] {
                for (size_t i = w; i < n; i += workers) {
                    explained[i] = exact_shap(model, rows.rows[i], background);
                }
            }));
        }
        for (std::future<void>& f : futures) f.get();
    }

    ShapSummary summary;
    summary.feature_names = rows.feature_names;
    summary.points.assign(m, {});
    summary.mean_abs_phi.assign(m, 0.0);
    for (size_t j = 0; j < m; ++j) summary.points[j].reserve(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) {
            summary.points[j].push_back({rows.rows[i][j], explained[i].phi[j]});
            summary.mean_abs_phi[j] += std::abs(explained[i].phi[j]);
        }
    }
    if (n > 0) {
        for (size_t j = 0; j < m; ++j) summary.mean_abs_phi[j] /= static_cast<double>(n);
    }
    return summary;
}

std::vector<std::string> rank_importance(const ShapSummary& summary) {
    std::vector<size_t> order(summary.feature_names.size());
    for (size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (summary.mean_abs_phi[a] != summary.mean_abs_phi[b]) {
            return summary.mean_abs_phi[a] > summary.mean_abs_phi[b];
        }
        return summary.feature_names[a] < summary.feature_names[b];
    });
    std::vector<std::string> out;
    out.reserve(order.size());
    for (size_t j : order) out.push_back(summary.feature_names[j]);
    return out;
}

Dataset sample_background(const Dataset& train, size_t size, uint64_t seed) {
    if (train.n_rows() == 0) throw std::invalid_argument("sample_background: empty dataset");
    if (size == 0) throw std::invalid_argument("sample_background: size must be positive");
    if (size >= train.n_rows()) return train;
    Rng rng(seed);
    std::vector<size_t> picks = rng.sample_indices(train.n_rows(), size);
    return train.subset(picks);
}

void append_shap_rows(std::string& out, const std::string& bucket, const ShapSummary& summary) {
    size_t n = summary.points.empty() ? 0 : summary.points[0].size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < summary.feature_names.size(); ++j) {
            const FeaturePoint& p = summary.points[j][i];
            out += csv::join_row({bucket, std::to_string(i), summary.feature_names[j],
                                  csv::format_number(p.value), csv::format_number(p.phi)});
            out += '\n';
        }
    }
}

void append_summary_rows(std::string& out, const std::string& bucket, const ShapSummary& summary) {
    std::vector<std::string> ranked = rank_importance(summary);
    for (size_t r = 0; r < ranked.size(); ++r) {
        size_t j = 0;
        while (summary.feature_names[j] != ranked[r]) ++j;
        out += csv::join_row({bucket, std::to_string(r + 1), ranked[r],
                              csv::format_number(summary.mean_abs_phi[j])});
        out += '\n';
    }
}

}  // namespace hpml::explain

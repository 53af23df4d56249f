#ifndef COORDGRAPH_FOREST_HPP
#define COORDGRAPH_FOREST_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "coordgraph/common.hpp"
#include "coordgraph/nn.hpp"

namespace coordgraph::nn {

/// Bagged CART ensemble, Gini impurity, sqrt(d) feature subsampling,
/// seeded bootstrap. Leaves store the positive-class fraction.
struct ForestConfig {
    int trees = 100;
    int max_depth = -1;  // -1 = unlimited
    int min_leaf = 1;
    std::uint64_t seed = 0;
};

struct ForestGrid {
    std::vector<int> trees = {100, 300};
    std::vector<int> max_depth = {8, 16, -1};
    std::vector<int> min_leaf = {1, 5};
};

struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1, right = -1;
    double p1 = 0.0;  // leaf positive fraction
};

struct RandomForestModel {
    ForestConfig config;
    std::vector<std::vector<TreeNode>> trees;

    double tree_proba(const std::vector<TreeNode>& tree, const auto& row) const {
        int node = 0;
        while (tree[node].feature >= 0)
            node = row(tree[node].feature) <= tree[node].threshold ? tree[node].left
                                                                   : tree[node].right;
        return tree[node].p1;
    }

    Vector predict_probabilities(const Matrix& X) const {
        Vector p = Vector::Zero(X.rows());
        for (const auto& tree : trees)
            for (Eigen::Index r = 0; r < X.rows(); ++r)
                p(r) += tree_proba(tree, X.row(r));
        return p / static_cast<double>(trees.size());
    }
};

namespace detail {

struct SplitResult {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

inline double gini(double n1, double n) {
    if (n <= 0.0) return 0.0;
    const double p = n1 / n;
    return 2.0 * p * (1.0 - p);
}

inline void build_tree(std::vector<TreeNode>& tree, const Matrix& X,
                       const std::vector<int>& labels, std::vector<std::uint32_t>& samples,
                       std::size_t lo, std::size_t hi, int depth,
                       const ForestConfig& cfg, std::size_t mtry, Rng& rng) {
    const int node_id = static_cast<int>(tree.size());
    tree.emplace_back();
    const double n = static_cast<double>(hi - lo);
    double n1 = 0.0;
    for (std::size_t s = lo; s < hi; ++s) n1 += labels[samples[s]];
    tree[node_id].p1 = n1 / n;

    const bool pure = n1 == 0.0 || n1 == n;
    const bool depth_out = cfg.max_depth >= 0 && depth >= cfg.max_depth;
    if (pure || depth_out || (hi - lo) < static_cast<std::size_t>(2 * cfg.min_leaf)) return;

    // sample mtry distinct candidate features
    std::vector<std::uint32_t> feats(static_cast<std::size_t>(X.cols()));
    for (std::uint32_t f = 0; f < feats.size(); ++f) feats[f] = f;
    for (std::size_t k = 0; k < mtry && k < feats.size(); ++k) {
        const std::size_t j = k + rng.uniform_index(feats.size() - k);
        std::swap(feats[k], feats[j]);
    }

    SplitResult best;
    const double parent = gini(n1, n);
    std::vector<std::pair<double, int>> vals;
    vals.reserve(hi - lo);
    for (std::size_t k = 0; k < mtry && k < feats.size(); ++k) {
        const std::uint32_t f = feats[k];
        vals.clear();
        for (std::size_t s = lo; s < hi; ++s)
            vals.emplace_back(X(samples[s], f), labels[samples[s]]);
        std::sort(vals.begin(), vals.end());
        double left1 = 0.0;
        for (std::size_t i = 1; i < vals.size(); ++i) {
            left1 += vals[i - 1].second;
            if (vals[i].first == vals[i - 1].first) continue;
            const double nl = static_cast<double>(i);
            const double nr = n - nl;
            if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
            const double gain =
                parent - (nl / n) * gini(left1, nl) - (nr / n) * gini(n1 - left1, nr);
            if (gain > best.gain + 1e-15) {
                best.gain = gain;
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (vals[i].first + vals[i - 1].first);
            }
        }
    }
    if (best.feature < 0) return;

    auto mid_it = std::stable_partition(
        samples.begin() + static_cast<std::ptrdiff_t>(lo),
        samples.begin() + static_cast<std::ptrdiff_t>(hi),
        [&](std::uint32_t s) { return X(s, best.feature) <= best.threshold; });
    const std::size_t mid = static_cast<std::size_t>(mid_it - samples.begin());
    if (mid == lo || mid == hi) return;

    tree[node_id].feature = best.feature;
    tree[node_id].threshold = best.threshold;
    tree[node_id].left = static_cast<int>(tree.size());
    build_tree(tree, X, labels, samples, lo, mid, depth + 1, cfg, mtry, rng);
    tree[node_id].right = static_cast<int>(tree.size());
    build_tree(tree, X, labels, samples, mid, hi, depth + 1, cfg, mtry, rng);
}

}  // namespace detail

inline RandomForestModel fit_forest(const Matrix& X, const std::vector<int>& labels,
                                    const std::vector<std::uint32_t>& train_idx,
                                    const ForestConfig& cfg) {
    RandomForestModel model;
    model.config = cfg;
    const std::size_t mtry = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols()))));
    model.trees.resize(static_cast<std::size_t>(cfg.trees));
    parallel_chunks(model.trees.size(), 4, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
            Rng rng(derive_seed(cfg.seed, t));
            std::vector<std::uint32_t> samples(train_idx.size());
            for (auto& s : samples)
                s = train_idx[rng.uniform_index(train_idx.size())];  // bootstrap
            auto& tree = model.trees[t];
            tree.reserve(2 * samples.size());
            detail::build_tree(tree, X, labels, samples, 0, samples.size(), 0, cfg,
                               mtry, rng);
        }
    });
    return model;
}

/// Gridsearch over {trees, max_depth, min_leaf}; winner by validation F1.
inline RandomForestModel train_random_forest(const Matrix& X, const std::vector<int>& labels,
                                             const std::vector<std::uint32_t>& train_idx,
                                             const std::vector<std::uint32_t>& val_idx,
                                             const ForestGrid& grid = {},
                                             std::uint64_t seed = 0) {
    check_finite(X);
    bool has0 = false, has1 = false;
    for (auto i : train_idx) (labels[i] ? has1 : has0) = true;
    if (!has0 || !has1)
        throw std::runtime_error("train_random_forest: single-class training set");

    RandomForestModel best;
    double best_f1 = -1.0;
    for (int trees : grid.trees)
        for (int depth : grid.max_depth)
            for (int min_leaf : grid.min_leaf) {
                ForestConfig cfg{trees, depth, min_leaf, seed};
                RandomForestModel m = fit_forest(X, labels, train_idx, cfg);
                const double f1 =
                    f1_score_at_half(m.predict_probabilities(X), labels,
                                     val_idx.empty() ? train_idx : val_idx);
                if (f1 > best_f1) {
                    best_f1 = f1;
                    best = std::move(m);
                }
            }
    return best;
}

}  // namespace coordgraph::nn

#endif

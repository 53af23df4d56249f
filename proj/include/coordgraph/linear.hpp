#ifndef COORDGRAPH_LINEAR_HPP
#define COORDGRAPH_LINEAR_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "coordgraph/nn.hpp"

namespace coordgraph::nn {

struct LogRegModel {
    Vector w;
    double b = 0.0;
    double l2 = 1e-3;

    Vector predict_probabilities(const Matrix& X) const {
        Vector p = X * w + Vector::Constant(X.rows(), b);
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = sigmoid(p(i));
        return p;
    }
};

inline const std::vector<double>& default_l2_grid() {
    static const std::vector<double> grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
    return grid;
}

namespace detail {

/// Full-batch Adam on mean BCE + l2/2 ||w||^2 (intercept unpenalized),
/// run to gradient convergence. Deterministic: no stochasticity anywhere.
inline LogRegModel fit_logreg(const Matrix& X, const std::vector<int>& labels,
                              const std::vector<std::uint32_t>& train_idx, double l2,
                              int max_iter = 3000, double tol = 1e-9) {
    LogRegModel model;
    model.w = Vector::Zero(X.cols());
    model.l2 = l2;
    Matrix Xt(train_idx.size(), X.cols());
    Vector y(train_idx.size());
    for (std::size_t r = 0; r < train_idx.size(); ++r) {
        Xt.row(static_cast<Eigen::Index>(r)) = X.row(train_idx[r]);
        y(static_cast<Eigen::Index>(r)) = labels[train_idx[r]];
    }
    const double inv_n = 1.0 / static_cast<double>(train_idx.size());

    Vector mw = Vector::Zero(X.cols()), vw = mw;
    double mb = 0.0, vb = 0.0;
    const double lr = 0.1, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    for (int t = 1; t <= max_iter; ++t) {
        Vector z = Xt * model.w + Vector::Constant(Xt.rows(), model.b);
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i)) - y(i);
        Vector gw = Xt.transpose() * z * inv_n + l2 * model.w;
        const double gb = z.sum() * inv_n;
        if (gw.lpNorm<Eigen::Infinity>() < tol && std::abs(gb) < tol) break;
        mw = beta1 * mw + (1.0 - beta1) * gw;
        vw = beta2 * vw + (1.0 - beta2) * gw.cwiseProduct(gw);
        mb = beta1 * mb + (1.0 - beta1) * gb;
        vb = beta2 * vb + (1.0 - beta2) * gb * gb;
        const double bc1 = 1.0 - std::pow(beta1, t);
        const double bc2 = 1.0 - std::pow(beta2, t);
        model.w.array() -= lr * (mw.array() / bc1) / ((vw.array() / bc2).sqrt() + eps);
        model.b -= lr * (mb / bc1) / (std::sqrt(vb / bc2) + eps);
    }
    return model;
}

}  // namespace detail

/// Gridsearch over the regularization strength; the winner maximizes
/// validation F1 (first best kept on ties).
inline LogRegModel train_logreg(const Matrix& X, const std::vector<int>& labels,
                                const std::vector<std::uint32_t>& train_idx,
                                const std::vector<std::uint32_t>& val_idx,
                                const std::vector<double>& l2_grid = default_l2_grid()) {
    check_finite(X);
    if (l2_grid.empty()) throw std::invalid_argument("train_logreg: empty grid");
    bool has0 = false, has1 = false;
    for (auto i : train_idx) (labels[i] ? has1 : has0) = true;
    if (!has0 || !has1)
        throw std::runtime_error("train_logreg: single-class training set");

    LogRegModel best;
    double best_f1 = -1.0;
    for (double l2 : l2_grid) {
        LogRegModel m = detail::fit_logreg(X, labels, train_idx, l2);
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

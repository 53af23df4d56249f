#ifndef COORDGRAPH_METRICS_HPP
#define COORDGRAPH_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace coordgraph {

/// F1 and ROC-AUC on the 0..100 percent scale. AUC uses the rank statistic
/// with midranks for ties; F1 thresholds at 0.5 with ties classed positive.
struct BinaryMetrics {
    double f1 = 0.0;
    double auc = 0.0;
};

inline double f1_percent(const std::vector<double>& probs, const std::vector<int>& labels) {
    if (probs.size() != labels.size())
        throw std::invalid_argument("f1_percent: size mismatch");
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const bool pred = probs[i] >= 0.5;
        if (pred && labels[i] == 1) ++tp;
        else if (pred && labels[i] == 0) ++fp;
        else if (!pred && labels[i] == 1) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom == 0.0 ? 0.0 : 200.0 * static_cast<double>(tp) / denom;
}

inline double auc_percent(const std::vector<double>& probs, const std::vector<int>& labels) {
    if (probs.size() != labels.size())
        throw std::invalid_argument("auc_percent: size mismatch");
    std::size_t n1 = 0, n0 = 0;
    for (int y : labels) (y ? n1 : n0)++;
    if (n1 == 0 || n0 == 0)
        throw std::runtime_error("auc_percent: AUC undefined for single-class labels");

    std::vector<std::size_t> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

    // midrank convention for tied scores
    std::vector<double> rank(probs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && probs[order[j + 1]] == probs[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k)
        if (labels[k] == 1) rank_sum += rank[k];
    const double u = rank_sum - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
    return 100.0 * u / (static_cast<double>(n1) * static_cast<double>(n0));
}

inline BinaryMetrics binary_metrics(const std::vector<double>& probs,
                                    const std::vector<int>& labels) {
    return {f1_percent(probs, labels), auc_percent(probs, labels)};
}

/// Harmonic mean with propagated uncertainty, neglecting correlations:
///   x~ = n / sum(1/x_i),  sigma^2 = (x~^2/n)^2 * sum((sigma_i / x_i^2)^2)
struct AggregateResult {
    double value = 0.0;
    double sigma = 0.0;
    std::size_t n = 0;
};

inline AggregateResult harmonic_aggregate(const std::vector<double>& values,
                                          const std::vector<double>& sigmas = {}) {
    if (values.empty()) throw std::invalid_argument("harmonic_aggregate: no values");
    if (!sigmas.empty() && sigmas.size() != values.size())
        throw std::invalid_argument("harmonic_aggregate: sigma size mismatch");
    double inv_sum = 0.0;
    for (double x : values) {
        if (x <= 0.0)
            throw std::runtime_error("harmonic_aggregate: values must be positive");
        inv_sum += 1.0 / x;
    }
    AggregateResult out;
    out.n = values.size();
    const double n = static_cast<double>(values.size());
    out.value = n / inv_sum;
    if (!sigmas.empty()) {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double term = sigmas[i] / (values[i] * values[i]);
            s += term * term;
        }
        const double scale = out.value * out.value / n;
        out.sigma = std::sqrt(scale * scale * s);
    }
    return out;
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Sample standard deviation (n-1); zero for fewer than two values.
inline double stdev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace coordgraph

#endif

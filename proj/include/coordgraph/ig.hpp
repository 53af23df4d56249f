#ifndef COORDGRAPH_IG_HPP
#define COORDGRAPH_IG_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "coordgraph/nn.hpp"

namespace coordgraph::ig {

using nn::DeepModel;
using nn::EdgeSet;
using nn::Matrix;
using nn::Vector;

enum class Quadrature { Trapezoid, LeftRiemann };

struct IGConfig {
    int steps = 256;
    Quadrature quadrature = Quadrature::Trapezoid;
    bool attribute_logit = false;  // attribute the raw logit instead of F(x)
};

/// F and dF/dx for one account at an interpolated input. For graph models the
/// path moves only the target account's feature row; every other row, the
/// adjacency, and the co-URL edge vectors stay fixed at their actual values.
class AttributionTarget {
public:
    AttributionTarget(const DeepModel& model, const Matrix& X, const CensoredGraph* g,
                      const EdgeSet* es, bool attribute_logit = false)
        : model_(model), X_(X), g_(g), es_(es), logit_(attribute_logit) {
        if (nn::is_graph_model(model.config.kind) && (!g || !es))
            throw std::invalid_argument("attribution: graph model without graph");
    }

    double value(std::uint32_t account, const Vector& row) const {
        if (nn::is_graph_model(model_.config.kind)) {
            Matrix X = X_;
            X.row(account) = row.transpose();
            nn::ForwardCache cache = model_.forward(X, g_, es_, nullptr);
            const double z = cache.logits(account);
            return logit_ ? z : nn::sigmoid(z);
        }
        Matrix X = row.transpose();
        nn::ForwardCache cache = model_.forward(X, nullptr, nullptr, nullptr);
        return logit_ ? cache.logits(0) : nn::sigmoid(cache.logits(0));
    }

    /// Gradient of the attribution target w.r.t. the account's feature row.
    Vector gradient(std::uint32_t account, const Vector& row) const {
        if (nn::is_graph_model(model_.config.kind)) {
            Matrix X = X_;
            X.row(account) = row.transpose();
            nn::ForwardCache cache = model_.forward(X, g_, es_, nullptr);
            Vector dlogits = Vector::Zero(cache.logits.size());
            const double p = nn::sigmoid(cache.logits(account));
            dlogits(account) = logit_ ? 1.0 : p * (1.0 - p);
            nn::Gradients grads = model_.backward(cache, dlogits, g_, es_, true);
            return grads.input.row(account).transpose();
        }
        Matrix X = row.transpose();
        nn::ForwardCache cache = model_.forward(X, nullptr, nullptr, nullptr);
        const double p = nn::sigmoid(cache.logits(0));
        Vector dlogits = Vector::Constant(1, logit_ ? 1.0 : p * (1.0 - p));
        nn::Gradients grads = model_.backward(cache, dlogits, nullptr, nullptr, true);
        return grads.input.row(0).transpose();
    }

private:
    const DeepModel& model_;
    const Matrix& X_;
    const CensoredGraph* g_;
    const EdgeSet* es_;
    bool logit_;
};

struct BaselineResult {
    Vector x;
    double prediction = 0.0;  // F(x')
    double band_lo = 0.4, band_hi = 0.6;
    std::size_t band_size = 0;
};

/// Empirical neutral baseline: mean feature vector over accounts whose
/// prediction falls within +-0.1 of 0.5. If the band is empty it widens in
/// +-0.05 increments up to [0.2, 0.8] before giving up.
inline BaselineResult empirical_baseline(const DeepModel& model, const Matrix& X,
                                         const CensoredGraph* g, const EdgeSet* es,
                                         const std::vector<std::uint32_t>& accounts) {
    if (accounts.empty())
        throw std::invalid_argument("empirical_baseline: empty account set");
    const Vector probs = model.predict_probabilities(X, g, es);
    BaselineResult out;
    for (double widen = 0.0; widen <= 0.30001; widen += 0.05) {
        out.band_lo = 0.4 - widen;
        out.band_hi = 0.6 + widen;
        Vector sum = Vector::Zero(X.cols());
        std::size_t count = 0;
        for (auto i : accounts)
            if (probs(i) >= out.band_lo && probs(i) <= out.band_hi) {
                sum += X.row(i).transpose();
                ++count;
            }
        if (count > 0) {
            out.x = sum / static_cast<double>(count);
            out.band_size = count;
            AttributionTarget target(model, X, g, es);
            out.prediction = target.value(accounts.front(), out.x);
            return out;
        }
    }
    throw std::runtime_error("empirical_baseline: no account predicts within [0.2, 0.8]");
}

struct IGResult {
    Vector attribution;          // signed, per feature
    double completeness_residual = 0.0;  // |sum IG - (F(x) - F(x'))|
    double fx = 0.0, fx_baseline = 0.0;
};

/// Integrated gradients along the straight-line path from x' to x:
/// IG_i = (x_i - x'_i) * integral of dF/dx_i, approximated with `steps`
/// quadrature points (trapezoid by default). Dropout is off throughout.
inline IGResult integrated_gradients(const DeepModel& model, const Matrix& X,
                                     const CensoredGraph* g, const EdgeSet* es,
                                     std::uint32_t account, const Vector& baseline,
                                     const IGConfig& config = {}) {
    if (config.steps < 2) throw std::invalid_argument("integrated_gradients: steps < 2");
    if (baseline.size() != X.cols())
        throw std::invalid_argument("integrated_gradients: baseline dim mismatch");
    AttributionTarget target(model, X, g, es, config.attribute_logit);
    const Vector x = X.row(account).transpose();
    const Vector delta = x - baseline;
    const int steps = config.steps;
    const bool trapezoid = config.quadrature == Quadrature::Trapezoid;

    Vector integral;
    if (!nn::is_graph_model(model.config.kind)) {
        // MLP rows are independent, so the whole path evaluates as one batch
        const int rows = trapezoid ? steps + 1 : steps;
        Matrix path(rows, x.size());
        for (int s = 0; s < rows; ++s)
            path.row(s) =
                (baseline + (static_cast<double>(s) / steps) * delta).transpose();
        nn::ForwardCache cache = model.forward(path, nullptr, nullptr, nullptr);
        Vector dlogits(rows);
        for (int s = 0; s < rows; ++s) {
            const double p = nn::sigmoid(cache.logits(s));
            double w = config.attribute_logit ? 1.0 : p * (1.0 - p);
            if (trapezoid && (s == 0 || s == steps)) w *= 0.5;
            dlogits(s) = w;
        }
        nn::Gradients grads = model.backward(cache, dlogits, nullptr, nullptr, true);
        integral = grads.input.colwise().sum().transpose() / static_cast<double>(steps);
    } else {
        integral = Vector::Zero(x.size());
        for (int s = 0; s < (trapezoid ? steps + 1 : steps); ++s) {
            const double alpha = static_cast<double>(s) / static_cast<double>(steps);
            double w = 1.0;
            if (trapezoid && (s == 0 || s == steps)) w = 0.5;
            integral += w * target.gradient(account, baseline + alpha * delta);
        }
        integral /= static_cast<double>(steps);
    }

    IGResult out;
    out.attribution = delta.cwiseProduct(integral);
    out.fx = target.value(account, x);
    out.fx_baseline = target.value(account, baseline);
    out.completeness_residual =
        std::abs(out.attribution.sum() - (out.fx - out.fx_baseline));
    return out;
}

/// Feature-group partition over an InputLayout: the content block, the three
/// embedding blocks, NF as a whole, and the five NF sub-features.
struct FeatureGrouping {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    std::size_t dim = 0;          // feature-space size the partition must cover
    std::size_t n_top_level = 0;  // groups beyond this index overlay the partition

    static FeatureGrouping from_layout(const InputLayout& layout) {
        FeatureGrouping grouping;
        auto range = [](std::size_t lo, std::size_t n) {
            std::vector<std::size_t> idx(n);
            for (std::size_t i = 0; i < n; ++i) idx[i] = lo + i;
            return idx;
        };
        grouping.groups.emplace_back("domains", range(0, layout.content_dim()));
        if (layout.flags.node2vec)
            grouping.groups.emplace_back("node2vec", range(layout.n2v_offset(), kNode2VecDim));
        if (layout.flags.le)
            grouping.groups.emplace_back("LE", range(layout.le_offset(), kLeDim));
        if (layout.flags.rwpe)
            grouping.groups.emplace_back("RWPE", range(layout.rwpe_offset(), kRwpeDim));
        if (layout.flags.nf)
            grouping.groups.emplace_back("NF", range(layout.nf_offset(), kNfDim));
        grouping.dim = layout.total_dim();
        grouping.n_top_level = grouping.groups.size();
        if (layout.flags.nf)
            for (int f = 0; f < kNfDim; ++f)
                grouping.groups.emplace_back(kNfNames[f],
                                             range(layout.nf_offset() + f, 1));
        return grouping;
    }

    /// The top-level groups must cover [0, dim) exactly once; the trailing
    /// NF sub-feature rows overlay the NF block and are exempt.
    void validate_partition() const {
        std::vector<int> seen(dim, 0);
        for (std::size_t gi = 0; gi < n_top_level && gi < groups.size(); ++gi)
            for (std::size_t idx : groups[gi].second) {
                if (idx >= dim)
                    throw std::invalid_argument("grouping: index out of range");
                ++seen[idx];
            }
        for (int c : seen)
            if (c != 1) throw std::invalid_argument("grouping: not a partition");
    }
};

/// Mean over accounts of the within-group sum of |IG| (sum of absolute
/// values avoids cancellation between features).
inline std::map<std::string, double> grouped_attribution(
    const std::vector<Vector>& per_account_ig, const FeatureGrouping& grouping) {
    if (grouping.dim > 0) grouping.validate_partition();
    std::map<std::string, double> out;
    if (per_account_ig.empty()) return out;
    for (const auto& [name, idx] : grouping.groups) {
        double total = 0.0;
        for (const auto& igv : per_account_ig) {
            double s = 0.0;
            for (std::size_t i : idx) s += std::abs(igv(static_cast<Eigen::Index>(i)));
            total += s;
        }
        out[name] = total / static_cast<double>(per_account_ig.size());
    }
    return out;
}

struct DomainAttribution {
    std::string domain;
    double ig = 0.0;  // signed mean
};

/// Mean signed IG per vocabulary domain, ranked by |value|, truncated.
inline std::vector<DomainAttribution> domain_level_attribution(
    const std::vector<Vector>& per_account_ig, const InputLayout& layout,
    std::size_t top_n) {
    std::vector<DomainAttribution> out;
    if (per_account_ig.empty()) return out;
    out.resize(layout.content_dim());
    for (std::size_t d = 0; d < layout.content_dim(); ++d) {
        double s = 0.0;
        for (const auto& igv : per_account_ig) s += igv(static_cast<Eigen::Index>(d));
        out[d] = {layout.vocabulary[d], s / static_cast<double>(per_account_ig.size())};
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::abs(a.ig) > std::abs(b.ig);
    });
    if (out.size() > top_n) out.resize(top_n);
    return out;
}

}  // namespace coordgraph::ig

#endif

#ifndef COORDGRAPH_NODE2VEC_HPP
#define COORDGRAPH_NODE2VEC_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "coordgraph/common.hpp"
#include "coordgraph/graph.hpp"

namespace coordgraph {

struct Node2VecConfig {
    int dim = 128;
    double p = 1.0;  // return parameter
    double q = 1.0;  // in-out parameter
    int walk_length = 80;
    int walks_per_node = 10;
    int window = 10;        // context radius, shrunk uniformly per center
    int negatives = 5;
    int epochs = 5;
    double alpha = 0.025;       // initial learning rate
    double min_alpha = 1e-4;    // linear decay floor
};

namespace detail {

/// Second-order biased walk step: from edge (prev -> cur) the next neighbor x
/// is drawn with weight 1/p if x == prev, 1 if x is adjacent to prev, 1/q
/// otherwise. p = q = 1 reduces to a uniform first-order walk.
inline std::uint32_t biased_step(const CensoredGraph& g, std::uint32_t prev,
                                 std::uint32_t cur, const Node2VecConfig& cfg,
                                 Rng& rng) {
    auto [lo, hi] = g.adj(cur);
    const std::size_t deg = static_cast<std::size_t>(hi - lo);
    if (cfg.p == 1.0 && cfg.q == 1.0)
        return lo[rng.uniform_index(deg)];
    double total = 0.0;
    thread_local std::vector<double> weights;
    weights.resize(deg);
    for (std::size_t k = 0; k < deg; ++k) {
        const std::uint32_t x = lo[k];
        double w;
        if (x == prev) w = 1.0 / cfg.p;
        else if (g.has_edge(x, prev)) w = 1.0;
        else w = 1.0 / cfg.q;
        weights[k] = w;
        total += w;
    }
    double r = rng.uniform01() * total;
    for (std::size_t k = 0; k < deg; ++k) {
        r -= weights[k];
        if (r <= 0.0) return lo[k];
    }
    return lo[deg - 1];
}

/// Alias method for O(1) sampling from the unigram^{3/4} negative table.
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& weights) {
        const std::size_t n = weights.size();
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        double total = 0.0;
        for (double w : weights) total += w;
        std::vector<double> scaled(n);
        std::vector<std::uint32_t> small, large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            const std::uint32_t l = large.back();
            small.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (std::uint32_t i : large) prob_[i] = 1.0;
        for (std::uint32_t i : small) prob_[i] = 1.0;
    }

    std::uint32_t sample(Rng& rng) const {
        const std::size_t i = static_cast<std::size_t>(rng.uniform_index(prob_.size()));
        return rng.uniform01() < prob_[i] ? static_cast<std::uint32_t>(i) : alias_[i];
    }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

}  // namespace detail

/// Generates the walk corpus. Each (round, start) walk has its own derived
/// seed, so generation can be chunked in parallel and still produce the same
/// corpus for any thread count.
inline std::vector<std::vector<std::uint32_t>> node2vec_walks(const CensoredGraph& g,
                                                              const Node2VecConfig& cfg,
                                                              std::uint64_t seed) {
    std::vector<std::uint32_t> starts;
    for (std::uint32_t v = 0; v < g.n_nodes; ++v)
        if (g.degree(v) > 0) starts.push_back(v);
    const std::size_t total = starts.size() * static_cast<std::size_t>(cfg.walks_per_node);
    std::vector<std::vector<std::uint32_t>> walks(total);
    parallel_chunks(total, 256, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t w = lo; w < hi; ++w) {
            const std::uint32_t start = starts[w % starts.size()];
            Rng rng(derive_seed(seed, (static_cast<std::uint64_t>(w / starts.size()) << 32) |
                                          start));
            auto& walk = walks[w];
            walk.reserve(static_cast<std::size_t>(cfg.walk_length) + 1);
            walk.push_back(start);
            std::uint32_t prev = start;
            std::uint32_t cur = start;
            for (int step = 0; step < cfg.walk_length; ++step) {
                const std::uint32_t next =
                    step == 0 ? g.adj(cur).first[rng.uniform_index(g.degree(cur))]
                              : detail::biased_step(g, prev, cur, cfg, rng);
                walk.push_back(next);
                prev = cur;
                cur = next;
            }
        }
    });
    return walks;
}

/// Skip-gram with negative sampling over the walk corpus. Training is
/// sequential (deterministic under seed); isolated nodes keep zero vectors.
/// Returns row-per-node embeddings; an edgeless graph yields all zeros.
inline Eigen::MatrixXd node2vec_embed(const CensoredGraph& g, const Node2VecConfig& cfg,
                                      std::uint64_t seed) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.n_nodes, cfg.dim);
    if (g.neighbors.empty()) return out;  // caller may warn: nothing to embed

    const auto walks = node2vec_walks(g, cfg, derive_seed(seed, "walks"));
    const std::size_t n = g.n_nodes;
    const int dim = cfg.dim;

    std::vector<double> freq(n, 0.0);
    for (const auto& walk : walks)
        for (std::uint32_t v : walk) freq[v] += 1.0;
    std::vector<double> neg_weight(n);
    for (std::size_t v = 0; v < n; ++v) neg_weight[v] = std::pow(freq[v], 0.75);
    detail::AliasTable negatives(neg_weight);

    Rng rng(derive_seed(seed, "sgns"));
    std::vector<float> emb(n * static_cast<std::size_t>(dim));
    std::vector<float> ctx(n * static_cast<std::size_t>(dim), 0.0f);
    for (auto& x : emb)
        x = static_cast<float>((rng.uniform01() - 0.5) / dim);

    std::vector<std::uint32_t> order(walks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    std::vector<float> grad(static_cast<std::size_t>(dim));

    const std::size_t total_steps = static_cast<std::size_t>(cfg.epochs) * walks.size();
    std::size_t done = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::uint32_t wi : order) {
            const double progress = static_cast<double>(done++) / static_cast<double>(total_steps);
            const float lr = static_cast<float>(
                std::max(cfg.min_alpha, cfg.alpha * (1.0 - progress)));
            const auto& walk = walks[wi];
            for (std::size_t c = 0; c < walk.size(); ++c) {
                const int b = 1 + static_cast<int>(rng.uniform_index(
                                      static_cast<std::uint64_t>(cfg.window)));
                const std::uint32_t center = walk[c];
                float* wv = emb.data() + static_cast<std::size_t>(center) * dim;
                const std::size_t lo = c >= static_cast<std::size_t>(b) ? c - b : 0;
                const std::size_t hi = std::min(walk.size() - 1, c + static_cast<std::size_t>(b));
                for (std::size_t t = lo; t <= hi; ++t) {
                    if (t == c) continue;
                    std::fill(grad.begin(), grad.end(), 0.0f);
                    for (int k = 0; k <= cfg.negatives; ++k) {
                        std::uint32_t target;
                        float label;
                        if (k == 0) {
                            target = walk[t];
                            label = 1.0f;
                        } else {
                            target = negatives.sample(rng);
                            if (target == walk[t]) continue;
                            label = 0.0f;
                        }
                        float* cv = ctx.data() + static_cast<std::size_t>(target) * dim;
                        float dot = 0.0f;
                        for (int d = 0; d < dim; ++d) dot += wv[d] * cv[d];
                        const float s = 1.0f / (1.0f + std::exp(-dot));
                        const float go = (label - s) * lr;
                        for (int d = 0; d < dim; ++d) {
                            grad[d] += go * cv[d];
                            cv[d] += go * wv[d];
                        }
                    }
                    for (int d = 0; d < dim; ++d) wv[d] += grad[d];
                }
            }
        }
    }

    for (std::uint32_t v = 0; v < n; ++v)
        if (g.degree(v) > 0)
            for (int d = 0; d < dim; ++d)
                out(v, d) = static_cast<double>(emb[static_cast<std::size_t>(v) * dim + d]);
    return out;
}

}  // namespace coordgraph

#endif

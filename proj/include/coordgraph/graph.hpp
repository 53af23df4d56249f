#ifndef COORDGRAPH_GRAPH_HPP
#define COORDGRAPH_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "coordgraph/common.hpp"
#include "coordgraph/courl.hpp"

namespace coordgraph {

struct GraphBuildConfig {
    std::uint64_t n = 10;      // minimum co-URL count
    int T = 15;                // interarrival cutoff, minutes
    bool t_inclusive = false;  // strict "less than T" by default (bins 1..T-1)
};

/// Undirected simple graph over account indices, adjacency in CSR form.
/// Neighbor lists are sorted, the diagonal is empty, and degree equals the
/// row length.
struct CensoredGraph {
    std::size_t n_nodes = 0;
    std::vector<std::size_t> offsets;       // size n_nodes + 1
    std::vector<std::uint32_t> neighbors;   // concatenated sorted lists
    bool disconnected = false;              // no edges at all

    std::size_t degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
    std::size_t n_edges() const { return neighbors.size() / 2; }

    std::pair<const std::uint32_t*, const std::uint32_t*> adj(std::uint32_t v) const {
        return {neighbors.data() + offsets[v], neighbors.data() + offsets[v + 1]};
    }

    bool has_edge(std::uint32_t u, std::uint32_t v) const {
        auto [lo, hi] = adj(u);
        return std::binary_search(lo, hi, v);
    }

    static CensoredGraph from_edges(std::size_t n,
                                    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
        std::vector<std::vector<std::uint32_t>> lists(n);
        for (auto [u, v] : edges) {
            if (u == v || u >= n || v >= n)
                throw std::invalid_argument("graph: bad edge");
            lists[u].push_back(v);
            lists[v].push_back(u);
        }
        CensoredGraph g;
        g.n_nodes = n;
        g.offsets.assign(n + 1, 0);
        for (std::size_t v = 0; v < n; ++v) {
            auto& l = lists[v];
            std::sort(l.begin(), l.end());
            l.erase(std::unique(l.begin(), l.end()), l.end());
            g.offsets[v + 1] = g.offsets[v] + l.size();
        }
        g.neighbors.reserve(g.offsets[n]);
        for (auto& l : lists) g.neighbors.insert(g.neighbors.end(), l.begin(), l.end());
        g.disconnected = g.neighbors.empty();
        return g;
    }
};

/// A_ij = 1 iff the pair shares at least n co-URLs with interarrival times
/// less than T ("less than" taken strictly: bins 1..T-1; a config switch
/// allows <= T). Requires the symmetrized map.
inline CensoredGraph build_censored_graph(const CoUrlMap& map, std::size_t n_accounts,
                                          const GraphBuildConfig& config) {
    if (!map.symmetrized)
        throw std::invalid_argument("build_censored_graph: map must be symmetrized");
    if (config.n < 1 || config.T < 1 || config.T > kCoUrlBins)
        throw std::invalid_argument("build_censored_graph: bad thresholds");
    const int upto = config.t_inclusive ? config.T : config.T - 1;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& [key, vec] : map.pairs) {
        const std::uint32_t i = static_cast<std::uint32_t>(key >> 32);
        const std::uint32_t j = static_cast<std::uint32_t>(key & 0xffffffffu);
        if (i >= j) continue;  // symmetric map carries both orientations
        if (vec.total_below(upto) >= config.n) edges.emplace_back(i, j);
    }
    return CensoredGraph::from_edges(n_accounts, edges);
}

/// Connected components (singletons included); returns component id per node.
inline std::vector<std::uint32_t> connected_components(const CensoredGraph& g,
                                                       std::size_t* n_components = nullptr) {
    std::vector<std::uint32_t> comp(g.n_nodes, UINT32_MAX);
    std::uint32_t next = 0;
    std::deque<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < g.n_nodes; ++s) {
        if (comp[s] != UINT32_MAX) continue;
        comp[s] = next;
        queue.push_back(s);
        while (!queue.empty()) {
            const std::uint32_t v = queue.front();
            queue.pop_front();
            auto [lo, hi] = g.adj(v);
            for (auto it = lo; it != hi; ++it)
                if (comp[*it] == UINT32_MAX) {
                    comp[*it] = next;
                    queue.push_back(*it);
                }
        }
        ++next;
    }
    if (n_components) *n_components = next;
    return comp;
}

/// The five per-node network statistics: degree, local clustering
/// coefficient, betweenness (normalized by (N-1)(N-2)/2), pagerank
/// (damping 0.85), and the HITS authority score. On an undirected graph the
/// HITS hub score equals the authority score, so one vector serves both.
struct NetworkFeatures {
    std::vector<double> degree, clustering, betweenness, pagerank, hits;
};

inline std::vector<double> clustering_coefficients(const CensoredGraph& g) {
    std::vector<double> cc(g.n_nodes, 0.0);
    for (std::uint32_t v = 0; v < g.n_nodes; ++v) {
        const std::size_t d = g.degree(v);
        if (d < 2) continue;
        auto [lo, hi] = g.adj(v);
        std::uint64_t links = 0;
        for (auto a = lo; a != hi; ++a)
            for (auto b = a + 1; b != hi; ++b)
                if (g.has_edge(*a, *b)) ++links;
        cc[v] = 2.0 * static_cast<double>(links) /
                (static_cast<double>(d) * static_cast<double>(d - 1));
    }
    return cc;
}

/// Brandes' algorithm; per-source passes run in fixed-size chunks so the
/// floating-point accumulation order is independent of the thread count.
inline std::vector<double> betweenness_centrality(const CensoredGraph& g) {
    const std::size_t n = g.n_nodes;
    std::vector<double> result(n, 0.0);
    if (n < 3) return result;

    const std::size_t chunk = 32;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<std::vector<double>> partial(n_chunks);

    parallel_chunks(n, chunk, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        std::vector<double>& acc = partial[c];
        acc.assign(n, 0.0);
        std::vector<std::int32_t> dist(n);
        std::vector<double> sigma(n), delta(n);
        std::vector<std::uint32_t> order;
        std::vector<std::vector<std::uint32_t>> preds(n);
        for (std::size_t s = lo; s < hi; ++s) {
            std::fill(dist.begin(), dist.end(), -1);
            std::fill(sigma.begin(), sigma.end(), 0.0);
            std::fill(delta.begin(), delta.end(), 0.0);
            order.clear();
            for (auto& p : preds) p.clear();
            dist[s] = 0;
            sigma[s] = 1.0;
            std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(s)};
            while (!queue.empty()) {
                const std::uint32_t v = queue.front();
                queue.pop_front();
                order.push_back(v);
                auto [alo, ahi] = g.adj(v);
                for (auto it = alo; it != ahi; ++it) {
                    const std::uint32_t w = *it;
                    if (dist[w] < 0) {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                    if (dist[w] == dist[v] + 1) {
                        sigma[w] += sigma[v];
                        preds[w].push_back(v);
                    }
                }
            }
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                const std::uint32_t w = *it;
                for (std::uint32_t v : preds[w])
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                if (w != s) acc[w] += delta[w];
            }
        }
    });

    for (const auto& acc : partial)
        if (!acc.empty())
            for (std::size_t v = 0; v < n; ++v) result[v] += acc[v];
    // undirected: each pair counted twice; normalize by (N-1)(N-2)/2
    const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
    for (auto& b : result) b *= scale;
    return result;
}

/// Power iteration with uniform teleport and dangling-mass redistribution.
inline std::vector<double> pagerank(const CensoredGraph& g, double damping = 0.85,
                                    double tol = 1e-12, int max_iter = 1000) {
    const std::size_t n = g.n_nodes;
    if (n == 0) return {};
    std::vector<double> pr(n, 1.0 / static_cast<double>(n)), next(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        double dangling = 0.0;
        for (std::uint32_t v = 0; v < n; ++v)
            if (g.degree(v) == 0) dangling += pr[v];
        const double base =
            (1.0 - damping + damping * dangling) / static_cast<double>(n);
        std::fill(next.begin(), next.end(), base);
        for (std::uint32_t v = 0; v < n; ++v) {
            const std::size_t d = g.degree(v);
            if (d == 0) continue;
            const double share = damping * pr[v] / static_cast<double>(d);
            auto [lo, hi] = g.adj(v);
            for (auto it = lo; it != hi; ++it) next[*it] += share;
        }
        double diff = 0.0;
        for (std::size_t v = 0; v < n; ++v) diff += std::abs(next[v] - pr[v]);
        pr.swap(next);
        if (diff < tol) break;
    }
    return pr;
}

/// HITS authority scores, L1-normalized. Undirected adjacency is symmetric,
/// so the hub iteration is identical and the same vector is returned for both.
inline std::vector<double> hits_authority(const CensoredGraph& g, double tol = 1e-12,
                                          int max_iter = 1000) {
    const std::size_t n = g.n_nodes;
    std::vector<double> x(n, 1.0), y(n);
    if (g.neighbors.empty()) {
        std::fill(x.begin(), x.end(), 0.0);
        return x;
    }
    auto apply_adjacency = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::uint32_t v = 0; v < n; ++v) {
            auto [lo, hi] = g.adj(v);
            double s = 0.0;
            for (auto it = lo; it != hi; ++it) s += in[*it];
            out[v] = s;
        }
    };
    std::vector<double> h(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        apply_adjacency(x, h);   // hub update
        apply_adjacency(h, y);   // authority update (A^2, avoids bipartite cycling)
        double norm = 0.0;
        for (double t : y) norm = std::max(norm, std::abs(t));
        if (norm == 0.0) break;
        for (auto& t : y) t /= norm;
        double diff = 0.0;
        for (std::size_t v = 0; v < n; ++v) diff += std::abs(y[v] - x[v]);
        x.swap(y);
        if (diff < tol) break;
    }
    double sum = 0.0;
    for (double t : x) sum += t;
    if (sum > 0.0)
        for (auto& t : x) t /= sum;
    return x;
}

inline NetworkFeatures network_features(const CensoredGraph& g) {
    NetworkFeatures nf;
    nf.degree.resize(g.n_nodes);
    for (std::uint32_t v = 0; v < g.n_nodes; ++v)
        nf.degree[v] = static_cast<double>(g.degree(v));
    nf.clustering = clustering_coefficients(g);
    nf.betweenness = betweenness_centrality(g);
    nf.pagerank = pagerank(g);
    nf.hits = hits_authority(g);
    return nf;
}

}  // namespace coordgraph

#endif

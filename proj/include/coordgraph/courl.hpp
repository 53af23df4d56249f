#ifndef COORDGRAPH_COURL_HPP
#define COORDGRAPH_COURL_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "coordgraph/common.hpp"
#include "coordgraph/events.hpp"

namespace coordgraph {

constexpr int kCoUrlBins = 100;  // bin tau covers tau-1 < t <= tau minutes

/// Per-pair interarrival histogram e^{ij}_tau, tau = 1..100.
struct CoUrlVector {
    std::array<std::uint32_t, kCoUrlBins> bins{};

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto b : bins) s += b;
        return s;
    }

    /// Sum of bins 1..upto (1-based, inclusive).
    std::uint64_t total_below(int upto) const {
        std::uint64_t s = 0;
        for (int t = 1; t <= upto && t <= kCoUrlBins; ++t) s += bins[t - 1];
        return s;
    }
};

inline std::uint64_t pair_key(std::uint32_t i, std::uint32_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | j;
}

/// Sparse map (i,j) -> e_ij over account indices. Directed on construction
/// (leader -> lagger); symmetrize() may be applied exactly once.
struct CoUrlMap {
    std::unordered_map<std::uint64_t, CoUrlVector> pairs;
    bool symmetrized = false;

    const CoUrlVector* find(std::uint32_t i, std::uint32_t j) const {
        auto it = pairs.find(pair_key(i, j));
        return it == pairs.end() ? nullptr : &it->second;
    }

    /// Keys in ascending (i,j) order for deterministic iteration/export.
    std::vector<std::uint64_t> sorted_keys() const {
        std::vector<std::uint64_t> keys;
        keys.reserve(pairs.size());
        for (const auto& [k, v] : pairs) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        return keys;
    }
};

/// Computes directed co-URL vectors: for each pair of distinct accounts
/// sharing the same exact URL string with interarrival t within the window,
/// the bin with tau-1 < t <= tau (minutes) is incremented for leader->lagger.
/// Simultaneous shares (t = 0) land in bin 1; the leader tie-break is
/// lexicographic on account_id. Every share pairs with every other share of
/// the same URL inside the window.
inline CoUrlMap compute_courls(const Corpus& corpus, int window_minutes = kCoUrlBins) {
    if (window_minutes < 1 || window_minutes > kCoUrlBins)
        throw std::invalid_argument("compute_courls: window must be in [1,100]");
    struct Share {
        std::int64_t t;
        std::uint32_t account;
    };
    std::unordered_map<std::string, std::vector<Share>> by_url;
    for (std::uint32_t a = 0; a < corpus.size(); ++a)
        for (const auto& ev : corpus.accounts[a].events)
            by_url[ev.url].push_back({ev.timestamp, a});

    // URL buckets are independent; chunk results merge in bucket order so the
    // outcome is identical for any thread count.
    std::vector<const std::vector<Share>*> buckets;
    {
        std::vector<std::pair<const std::string*, const std::vector<Share>*>> tmp;
        tmp.reserve(by_url.size());
        for (const auto& [url, shares] : by_url)
            if (shares.size() > 1) tmp.emplace_back(&url, &shares);
        std::sort(tmp.begin(), tmp.end(),
                  [](const auto& a, const auto& b) { return *a.first < *b.first; });
        buckets.reserve(tmp.size());
        for (const auto& [url, shares] : tmp) buckets.push_back(shares);
    }

    const std::int64_t window_s = static_cast<std::int64_t>(window_minutes) * 60;
    const std::size_t chunk = 64;
    const std::size_t n_chunks = buckets.empty() ? 0 : (buckets.size() + chunk - 1) / chunk;
    std::vector<std::unordered_map<std::uint64_t, CoUrlVector>> partial(n_chunks);

    parallel_chunks(buckets.size(), chunk, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        auto& local = partial[c];
        std::vector<Share> shares;
        for (std::size_t b = lo; b < hi; ++b) {
            shares = *buckets[b];
            std::sort(shares.begin(), shares.end(), [](const Share& x, const Share& y) {
                return x.t < y.t || (x.t == y.t && x.account < y.account);
            });
            for (std::size_t k = 0; k < shares.size(); ++k) {
                for (std::size_t m = k + 1; m < shares.size(); ++m) {
                    const std::int64_t dt = shares[m].t - shares[k].t;
                    if (dt > window_s) break;
                    if (shares[k].account == shares[m].account) continue;
                    std::uint32_t leader = shares[k].account;
                    std::uint32_t lagger = shares[m].account;
                    if (dt == 0 &&
                        corpus.accounts[lagger].account_id < corpus.accounts[leader].account_id)
                        std::swap(leader, lagger);
                    const int tau = dt == 0 ? 1 : static_cast<int>((dt + 59) / 60);
                    local[pair_key(leader, lagger)].bins[tau - 1]++;
                }
            }
        }
    });

    CoUrlMap out;
    for (auto& local : partial)
        for (auto& [key, vec] : local) {
            auto& dst = out.pairs[key];
            for (int t = 0; t < kCoUrlBins; ++t) dst.bins[t] += vec.bins[t];
        }
    return out;
}

/// e_ij <- e_ij + e_ji for every pair; the result holds both orientations
/// with equal vectors. Rejects maps already symmetrized (applying the rule
/// twice would double every count).
inline CoUrlMap symmetrize(const CoUrlMap& directed) {
    if (directed.symmetrized)
        throw std::logic_error("symmetrize: map is already symmetrized");
    CoUrlMap out;
    out.symmetrized = true;
    for (const auto& [key, vec] : directed.pairs) {
        const std::uint32_t i = static_cast<std::uint32_t>(key >> 32);
        const std::uint32_t j = static_cast<std::uint32_t>(key & 0xffffffffu);
        auto& fwd = out.pairs[key];
        auto& rev = out.pairs[pair_key(j, i)];
        for (int t = 0; t < kCoUrlBins; ++t) {
            fwd.bins[t] += vec.bins[t];
            rev.bins[t] += vec.bins[t];
        }
    }
    return out;
}

/// Cumulative distribution of co-URL counts over tau for one campaign
/// (both pair endpoints inside the campaign).
struct CoordinationCdf {
    std::array<double, kCoUrlBins> value{};
    bool degenerate = false;  // no intra-campaign co-URL mass
};

inline CoordinationCdf campaign_cdf(const CoUrlMap& map, const Corpus& corpus,
                                    const std::string& campaign) {
    std::array<std::uint64_t, kCoUrlBins> counts{};
    for (const auto& [key, vec] : map.pairs) {
        const std::uint32_t i = static_cast<std::uint32_t>(key >> 32);
        const std::uint32_t j = static_cast<std::uint32_t>(key & 0xffffffffu);
        if (map.symmetrized && i > j) continue;  // count each unordered pair once
        if (corpus.accounts[i].campaign != campaign ||
            corpus.accounts[j].campaign != campaign)
            continue;
        for (int t = 0; t < kCoUrlBins; ++t) counts[t] += vec.bins[t];
    }
    CoordinationCdf cdf;
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) {
        cdf.degenerate = true;
        return cdf;
    }
    std::uint64_t run = 0;
    for (int t = 0; t < kCoUrlBins; ++t) {
        run += counts[t];
        cdf.value[t] = static_cast<double>(run) / static_cast<double>(total);
    }
    return cdf;
}

enum class CdfMetric { MAD, KS, MSD };

inline CdfMetric cdf_metric_from_name(const std::string& name) {
    if (name == "MAD") return CdfMetric::MAD;
    if (name == "KS") return CdfMetric::KS;
    if (name == "MSD") return CdfMetric::MSD;
    throw std::invalid_argument("unknown CDF metric: " + name);
}

/// MAD = mean |delta|, KS = max |delta|, MSD = mean delta^2 over the 100-bin
/// support. Symmetric in both arguments; degenerate inputs are an error.
inline double cdf_distance(const CoordinationCdf& a, const CoordinationCdf& b,
                           CdfMetric metric) {
    if (a.degenerate || b.degenerate)
        throw std::invalid_argument("cdf_distance: degenerate CDF");
    double acc = 0.0;
    for (int t = 0; t < kCoUrlBins; ++t) {
        const double d = std::abs(a.value[t] - b.value[t]);
        switch (metric) {
            case CdfMetric::MAD: acc += d; break;
            case CdfMetric::KS: acc = std::max(acc, d); break;
            case CdfMetric::MSD: acc += d * d; break;
        }
    }
    if (metric == CdfMetric::KS) return acc;
    return acc / kCoUrlBins;
}

enum class MatrixNormalization { Product, GeometricMean };

/// Campaign-by-campaign co-URL matrix. Entry (A,B) sums directed counts with
/// the leader in A and the lagger in B (bin 1 only when the near-simultaneous
/// flag is set), normalized by the leading/lagging subset sizes.
struct CrossCampaignMatrix {
    std::vector<std::string> campaigns;
    std::vector<std::vector<double>> value;  // [lead][lag]
    std::vector<std::vector<bool>> empty_flag;
};

inline CrossCampaignMatrix cross_campaign_matrix(
    const CoUrlMap& directed, const Corpus& corpus,
    const std::vector<std::string>& campaigns, bool near_simultaneous_only,
    MatrixNormalization norm = MatrixNormalization::Product) {
    if (directed.symmetrized)
        throw std::invalid_argument("cross_campaign_matrix: needs the directed map");
    std::unordered_map<std::string, std::size_t> campaign_index;
    std::vector<std::size_t> sizes(campaigns.size(), 0);
    for (std::size_t c = 0; c < campaigns.size(); ++c) campaign_index[campaigns[c]] = c;
    for (const auto& rec : corpus.accounts) {
        auto it = campaign_index.find(rec.campaign);
        if (it != campaign_index.end()) ++sizes[it->second];
    }

    const std::size_t n = campaigns.size();
    std::vector<std::vector<std::uint64_t>> counts(n, std::vector<std::uint64_t>(n, 0));
    for (const auto& [key, vec] : directed.pairs) {
        const std::uint32_t i = static_cast<std::uint32_t>(key >> 32);
        const std::uint32_t j = static_cast<std::uint32_t>(key & 0xffffffffu);
        auto ci = campaign_index.find(corpus.accounts[i].campaign);
        auto cj = campaign_index.find(corpus.accounts[j].campaign);
        if (ci == campaign_index.end() || cj == campaign_index.end()) continue;
        const std::uint64_t mass =
            near_simultaneous_only ? vec.bins[0] : vec.total();
        counts[ci->second][cj->second] += mass;
    }

    CrossCampaignMatrix out;
    out.campaigns = campaigns;
    out.value.assign(n, std::vector<double>(n, 0.0));
    out.empty_flag.assign(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (sizes[a] == 0 || sizes[b] == 0) {
                out.empty_flag[a][b] = true;
                continue;
            }
            const double denom =
                norm == MatrixNormalization::Product
                    ? static_cast<double>(sizes[a]) * static_cast<double>(sizes[b])
                    : std::sqrt(static_cast<double>(sizes[a]) *
                                static_cast<double>(sizes[b]));
            out.value[a][b] = static_cast<double>(counts[a][b]) / denom;
        }
    return out;
}

/// Totals for inclusion criterion (5): per-account co-URL count and
/// distinct-partner count, from the directed map.
inline AccountCoUrlStats per_account_courl_stats(const CoUrlMap& map,
                                                 std::size_t n_accounts) {
    AccountCoUrlStats stats;
    stats.courls.assign(n_accounts, 0);
    std::vector<std::vector<std::uint32_t>> partners(n_accounts);
    for (const auto& [key, vec] : map.pairs) {
        const std::uint32_t i = static_cast<std::uint32_t>(key >> 32);
        const std::uint32_t j = static_cast<std::uint32_t>(key & 0xffffffffu);
        const std::uint64_t mass = vec.total();
        if (mass == 0) continue;
        stats.courls[i] += mass;
        stats.courls[j] += mass;
        partners[i].push_back(j);
        partners[j].push_back(i);
    }
    if (map.symmetrized)
        for (auto& c : stats.courls) c /= 2;  // both orientations were counted
    stats.neighbors.assign(n_accounts, 0);
    for (std::size_t a = 0; a < n_accounts; ++a) {
        auto& p = partners[a];
        std::sort(p.begin(), p.end());
        stats.neighbors[a] = std::unique(p.begin(), p.end()) - p.begin();
    }
    return stats;
}

}  // namespace coordgraph

#endif

#ifndef COORDGRAPH_SYNTH_HPP
#define COORDGRAPH_SYNTH_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "coordgraph/common.hpp"
#include "coordgraph/events.hpp"

#include <json.hpp>

namespace coordgraph::synth {

/// Re-share delay distribution for coordinated campaign activity.
struct CoordinationKernel {
    enum class Family { Exponential, Lognormal };
    Family family = Family::Exponential;
    double scale_minutes = 1.0;  // exponential mean / lognormal median
    double sigma = 0.8;          // lognormal only

    double sample_minutes(Rng& rng) const {
        return family == Family::Exponential ? rng.exponential(scale_minutes)
                                             : rng.lognormal(scale_minutes, sigma);
    }
};

/// The shared organic background: a pool of URLs over the shared domains that
/// both baseline accounts and (as background activity) IO accounts draw from.
/// Campaigns and baseline carrying the same world produce the same URL pool,
/// which is what makes incidental IO-baseline co-shares possible.
struct OrganicWorld {
    std::vector<std::string> shared_domain_pool;
    double zipf_exponent = 0.9;
    std::size_t n_urls = 20000;
    double burst_fraction = 0.05;       // URLs shared in a short-lived burst
    double burst_scale_minutes = 30.0;
    std::int64_t start_time = 1500000000;  // epoch seconds
    double window_days = 270.0;
    std::uint64_t seed = 1;
};

struct CampaignSpec {
    std::string name;
    std::size_t num_accounts = 100;
    double duration_days = 120.0;
    double start_day = 0.0;
    std::vector<std::string> io_domain_pool;
    OrganicWorld world;  // holds the shared_domain_pool
    double io_domain_mix = 0.3;       // coordinated share uses io pool w.p. mix
    /// campaigns spread flatter over the shared pool than organic users do;
    /// the resulting per-capita profile difference is common to every
    /// operation, so it survives censorship and transfers across campaigns
    double shared_zipf = 0.55;
    CoordinationKernel kernel;
    double shares_per_account = 60.0;
    double organic_fraction = 0.25;   // fraction of activity that is background
    double sharers_per_source = 6.0;  // expected co-sharers per source (within a cell)
    double participation_spread = 0.5;  // per-account rate multiplier in [1-s,1+s]
    /// campaigns operate as small cells, each pushing its own source stream;
    /// 0 means one monolithic cell
    std::size_t cell_size = 10;
    std::uint64_t seed = 0;

    const std::vector<std::string>& shared_domain_pool() const {
        return world.shared_domain_pool;
    }
};

struct BaselineSpec {
    std::size_t num_accounts = 1000;
    OrganicWorld world;
    double activity_rate = 50.0;  // mean shares per account
    double hub_fraction = 0.06;   // highly active accounts that chase bursts
    double hub_multiplier = 2.0;
    double hub_burst_bias = 0.35;  // hub probability of picking a bursty URL
    // organic micro-communities: small pods re-share a private URL stream
    // with short delays, yielding tiny legitimate-coordination components
    double pod_fraction = 0.10;    // accounts organized into pods of 2-4
    double pod_urls = 25.0;        // shared stream length per pod
    double pod_scale_minutes = 5.0;
    std::uint64_t seed = 0;

    double zipf_exponent() const { return world.zipf_exponent; }
};

namespace detail {

/// Cumulative-weight Zipf sampler over ranks 1..n with weight 1/k^s.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double exponent) : cumulative_(n) {
        if (n == 0 || exponent <= 0.0)
            throw std::invalid_argument("ZipfSampler: need n > 0 and exponent > 0");
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            total += std::pow(static_cast<double>(k + 1), -exponent);
            cumulative_[k] = total;
        }
    }

    std::size_t sample(Rng& rng) const {
        const double r = rng.uniform01() * cumulative_.back();
        return static_cast<std::size_t>(
            std::lower_bound(cumulative_.begin(), cumulative_.end(), r) -
            cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

struct OrganicUrl {
    std::string url;
    std::int64_t base_time = 0;
    bool bursty = false;
};

/// Deterministic function of the world alone.
inline std::vector<OrganicUrl> organic_urls(const OrganicWorld& world) {
    if (world.shared_domain_pool.empty())
        throw std::invalid_argument("organic_urls: empty shared domain pool");
    std::vector<OrganicUrl> urls(world.n_urls);
    const ZipfSampler domains(world.shared_domain_pool.size(), world.zipf_exponent);
    const double window_s = world.window_days * 86400.0;
    Rng rng(derive_seed(world.seed, "organic-urls"));
    for (std::size_t u = 0; u < world.n_urls; ++u) {
        const std::size_t d = domains.sample(rng);
        urls[u].url = "http://" + world.shared_domain_pool[d] + "/p" + std::to_string(u);
        urls[u].base_time =
            world.start_time + static_cast<std::int64_t>(rng.uniform01() * window_s);
        urls[u].bursty = rng.bernoulli(world.burst_fraction);
    }
    return urls;
}

inline std::int64_t organic_share_time(const OrganicUrl& url, const OrganicWorld& world,
                                       Rng& rng) {
    if (url.bursty)
        return url.base_time +
               static_cast<std::int64_t>(rng.exponential(world.burst_scale_minutes * 60.0));
    return world.start_time +
           static_cast<std::int64_t>(rng.uniform01() * world.window_days * 86400.0);
}

inline std::string account_name(const std::string& prefix, std::size_t i) {
    std::string n = std::to_string(i);
    if (n.size() < 4) n.insert(0, 4 - n.size(), '0');
    return prefix + "_" + n;
}

}  // namespace detail

namespace detail {

struct SourceHeader {
    std::int64_t ts;
    std::string url;
    bool io_domain = false;
};

inline std::size_t campaign_source_count(const CampaignSpec& spec) {
    const double coordinated =
        spec.shares_per_account * (1.0 - spec.organic_fraction);
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(static_cast<double>(spec.num_accounts) * coordinated /
                                        spec.sharers_per_source +
                                    0.5));
}

/// Replays the head of source s's stream: timestamp, domain choice, URL.
/// generate_campaign continues the same stream for seeder and participants,
/// so any consumer can reconstruct the source headers independently.
inline SourceHeader read_source_header(const CampaignSpec& spec, std::size_t s, Rng& rng,
                                       const ZipfSampler& shared_domains) {
    const std::int64_t t0 =
        spec.world.start_time + static_cast<std::int64_t>(spec.start_day * 86400.0);
    const double duration_s = spec.duration_days * 86400.0;
    SourceHeader h;
    h.ts = t0 + static_cast<std::int64_t>(rng.uniform01() * duration_s);
    std::string domain;
    if (rng.bernoulli(spec.io_domain_mix)) {
        domain = spec.io_domain_pool[rng.uniform_index(spec.io_domain_pool.size())];
        h.io_domain = true;
    } else {
        domain = spec.shared_domain_pool()[shared_domains.sample(rng)];
    }
    h.url = "http://" + domain + "/" + spec.name + "-s" + std::to_string(s);
    return h;
}

}  // namespace detail

/// Campaign generator. Source URLs are seeded by a lead account and re-shared
/// by a per-source subset of the campaign with kernel-distributed delays;
/// URL identity is domain + a per-source unique path token, so co-URLs need
/// the same seeded source. A slice of each account's activity is organic
/// background drawn from the shared world. Pure function of the spec.
inline std::vector<ShareEvent> generate_campaign(const CampaignSpec& spec) {
    if (spec.io_domain_mix < 0.0 || spec.io_domain_mix > 1.0)
        throw std::invalid_argument("generate_campaign: io_domain_mix out of range");
    if (spec.io_domain_mix > 0.0 && spec.io_domain_pool.empty())
        throw std::invalid_argument("generate_campaign: empty io_domain_pool");
    if (spec.kernel.scale_minutes <= 0.0)
        throw std::invalid_argument("generate_campaign: kernel scale must be positive");

    std::vector<ShareEvent> events;
    const std::size_t n = spec.num_accounts;
    if (n == 0) return events;

    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = detail::account_name(spec.name, i);

    // per-account participation multipliers
    std::vector<double> participation(n);
    {
        Rng rng(derive_seed(spec.seed, "participation"));
        for (auto& p : participation)
            p = rng.uniform(1.0 - spec.participation_spread, 1.0 + spec.participation_spread);
    }

    const std::size_t n_sources = detail::campaign_source_count(spec);
    const detail::ZipfSampler shared_domains(spec.shared_domain_pool().size(),
                                             spec.shared_zipf);
    const std::size_t cell =
        spec.cell_size == 0 ? n : std::min<std::size_t>(spec.cell_size, n);
    const std::size_t n_cells = (n + cell - 1) / cell;

    // coordinated sources; each source belongs to one cell and has its own
    // derived stream
    for (std::size_t s = 0; s < n_sources; ++s) {
        Rng rng(derive_seed(spec.seed, (0x5eedull << 32) | s));
        const detail::SourceHeader src =
            detail::read_source_header(spec, s, rng, shared_domains);

        const std::size_t c = rng.uniform_index(n_cells);
        const std::size_t lo = c * cell;
        const std::size_t hi = std::min(n, lo + cell);
        const std::size_t seeder = lo + rng.uniform_index(hi - lo);
        events.push_back({ids[seeder], src.ts, src.url, ""});
        const double base_p =
            spec.sharers_per_source / static_cast<double>(hi - lo);
        for (std::size_t a = lo; a < hi; ++a) {
            if (a == seeder) continue;
            if (!rng.bernoulli(std::min(1.0, base_p * participation[a]))) continue;
            const double delay_min = spec.kernel.sample_minutes(rng);
            events.push_back(
                {ids[a], src.ts + static_cast<std::int64_t>(delay_min * 60.0), src.url, ""});
        }
    }

    // organic background, parallel per account via derived sub-seeds
    const auto pool = detail::organic_urls(spec.world);
    const detail::ZipfSampler popularity(pool.size(), spec.world.zipf_exponent);
    const double organic_rate = spec.shares_per_account * spec.organic_fraction;
    for (std::size_t a = 0; a < n; ++a) {
        Rng rng(derive_seed(spec.seed, (0x0a60ull << 32) | a));
        const std::uint64_t k = rng.poisson(organic_rate * participation[a]);
        for (std::uint64_t e = 0; e < k; ++e) {
            const auto& u = pool[popularity.sample(rng)];
            events.push_back(
                {ids[a], detail::organic_share_time(u, spec.world, rng), u.url, ""});
        }
    }
    return events;
}

/// Baseline generator: independent Poisson activity over the organic world.
/// Hub accounts are more active and biased toward bursty URLs, which is where
/// incidental short-interarrival co-shares come from. Pod accounts re-share a
/// small private stream together, forming tiny legitimate-coordination
/// components (pairs and triangles), nothing like a campaign block.
inline std::vector<ShareEvent> generate_baseline(const BaselineSpec& spec) {
    std::vector<ShareEvent> events;
    const auto pool = detail::organic_urls(spec.world);
    const detail::ZipfSampler popularity(pool.size(), spec.world.zipf_exponent);

    std::vector<std::size_t> bursty_ids;
    for (std::size_t u = 0; u < pool.size(); ++u)
        if (pool[u].bursty) bursty_ids.push_back(u);

    for (std::size_t a = 0; a < spec.num_accounts; ++a) {
        Rng rng(derive_seed(spec.seed, (0xba5eull << 32) | a));
        const bool hub = rng.bernoulli(spec.hub_fraction);
        const double rate = spec.activity_rate * (hub ? spec.hub_multiplier : 1.0);
        const std::uint64_t k = rng.poisson(rate);
        const std::string id = detail::account_name("base", a);
        for (std::uint64_t e = 0; e < k; ++e) {
            std::size_t u;
            if (hub && !bursty_ids.empty() && rng.bernoulli(spec.hub_burst_bias))
                u = bursty_ids[popularity.sample(rng) % bursty_ids.size()];
            else
                u = popularity.sample(rng);
            events.push_back({id, detail::organic_share_time(pool[u], spec.world, rng),
                              pool[u].url, ""});
        }
    }

    // pods: consecutive account groups of 2-4 sharing a private stream
    const auto n_pod_accounts =
        static_cast<std::size_t>(spec.pod_fraction * static_cast<double>(spec.num_accounts));
    std::size_t next = 0, pod_id = 0;
    Rng pod_rng(derive_seed(spec.seed, "pods"));
    const double window_s = spec.world.window_days * 86400.0;
    while (next < n_pod_accounts) {
        const std::size_t size = std::min<std::size_t>(
            2 + pod_rng.uniform_index(3), n_pod_accounts - next);
        if (size < 2) break;
        const std::uint64_t n_urls = pod_rng.poisson(spec.pod_urls);
        for (std::uint64_t u = 0; u < n_urls; ++u) {
            const std::size_t d = pod_rng.uniform_index(spec.world.shared_domain_pool.size());
            const std::string url = "http://" + spec.world.shared_domain_pool[d] +
                                    "/pod" + std::to_string(pod_id) + "-" +
                                    std::to_string(u);
            const std::int64_t ts =
                spec.world.start_time +
                static_cast<std::int64_t>(pod_rng.uniform01() * window_s);
            for (std::size_t m = 0; m < size; ++m)
                events.push_back(
                    {detail::account_name("base", next + m),
                     ts + static_cast<std::int64_t>(
                              pod_rng.exponential(spec.pod_scale_minutes * 60.0)),
                     url, ""});
        }
        next += size;
        ++pod_id;
    }
    return events;
}

/// Baseline accounts that amplify campaign content: each follows a subset of
/// the campaigns and re-shares their source URLs with moderate delays. They
/// mirror the high-interaction slice of the real baseline and are what ties
/// campaign blocks and baseline into one co-sharing component.
struct AmplifierSpec {
    std::size_t num_accounts = 100;
    double follow_prob = 0.4;       // per (amplifier, campaign)
    int max_cells = 3;              // cells followed within a campaign (1..max)
    double reshares_per_cell = 30.0;
    double reshare_spread = 0.6;    // per-cell rate multiplier in [1-s, 1+s]
    double scale_minutes = 8.0;     // re-share delay after the source post
    std::uint64_t seed = 0;
};

inline std::vector<ShareEvent> generate_amplifiers(
    const std::vector<CampaignSpec>& campaigns, const AmplifierSpec& spec) {
    std::vector<ShareEvent> events;
    for (std::size_t a = 0; a < spec.num_accounts; ++a) {
        Rng rng(derive_seed(spec.seed, (0xa11full << 32) | a));
        const std::string id = detail::account_name("base_amp", a);
        for (const auto& campaign : campaigns) {
            if (!rng.bernoulli(spec.follow_prob)) continue;
            const std::size_t n_sources = detail::campaign_source_count(campaign);
            const detail::ZipfSampler shared_domains(campaign.shared_domain_pool().size(),
                                                     campaign.shared_zipf);
            const std::size_t cell = campaign.cell_size == 0
                                         ? campaign.num_accounts
                                         : std::min(campaign.cell_size,
                                                    campaign.num_accounts);
            const std::size_t n_cells = (campaign.num_accounts + cell - 1) / cell;
            // follow a handful of the campaign's cells, each at its own rate
            std::vector<double> cell_rate(n_cells, 0.0);
            const std::size_t k_cells = std::min<std::size_t>(
                n_cells, 1 + rng.uniform_index(static_cast<std::uint64_t>(
                                 std::max(1, spec.max_cells))));
            const double sources_per_cell =
                static_cast<double>(n_sources) / static_cast<double>(n_cells);
            for (std::size_t k = 0; k < k_cells; ++k) {
                const std::size_t c = rng.uniform_index(n_cells);
                cell_rate[c] = std::min(
                    1.0, spec.reshares_per_cell *
                             rng.uniform(1.0 - spec.reshare_spread,
                                         1.0 + spec.reshare_spread) /
                             sources_per_cell);
            }
            for (std::size_t s = 0; s < n_sources; ++s) {
                Rng src_rng(derive_seed(campaign.seed, (0x5eedull << 32) | s));
                const detail::SourceHeader src =
                    detail::read_source_header(campaign, s, src_rng, shared_domains);
                const std::size_t c = src_rng.uniform_index(n_cells);
                if (cell_rate[c] == 0.0 || !rng.bernoulli(cell_rate[c])) continue;
                if (src.io_domain) continue;  // amplifiers stick to mainstream links
                events.push_back(
                    {id,
                     src.ts + static_cast<std::int64_t>(
                                  rng.exponential(spec.scale_minutes * 60.0)),
                     src.url, ""});
            }
        }
    }
    return events;
}

struct Scenario {
    std::vector<CampaignSpec> campaigns;
    BaselineSpec baseline;
    AmplifierSpec amplifiers;
    /// operation -> {earlier campaign, later campaign}
    std::vector<std::array<std::string, 2>> operations;
};

/// All scenario events with labels: campaigns are IO, organic baseline and
/// amplifiers are class 0 under the baseline campaign token.
struct LabeledEvents {
    std::vector<ShareEvent> events;
    std::vector<int> labels;
    std::vector<std::string> campaigns;
};

inline LabeledEvents generate_scenario_events(const Scenario& sc) {
    LabeledEvents out;
    auto add = [&](std::vector<ShareEvent>&& events, int label, const std::string& campaign) {
        for (auto& e : events) {
            out.events.push_back(std::move(e));
            out.labels.push_back(label);
            out.campaigns.push_back(campaign);
        }
    };
    for (const auto& spec : sc.campaigns)
        add(generate_campaign(spec), 1, spec.name);
    add(generate_baseline(sc.baseline), 0, kBaselineCampaign);
    add(generate_amplifiers(sc.campaigns, sc.amplifiers), 0, kBaselineCampaign);
    return out;
}

/// Bundled scenarios. "three-ops": three independent operations with two
/// temporal waves each plus one baseline — the rehearsal corpus for the
/// A/B task suites. Generator parameters are fixed here.
inline Scenario scenario(const std::string& name, std::uint64_t seed = 1) {
    if (name != "three-ops")
        throw std::invalid_argument("unknown scenario: " + name);

    OrganicWorld world;
    world.zipf_exponent = 0.9;
    world.n_urls = 24000;
    world.burst_fraction = 0.09;
    world.burst_scale_minutes = 40.0;
    world.window_days = 300.0;
    world.seed = derive_seed(seed, "world");
    world.shared_domain_pool.reserve(600);
    const char* tlds[] = {".com", ".net", ".org", ".info", ".co.uk", ".de"};
    for (int d = 0; d < 600; ++d)
        world.shared_domain_pool.push_back("sdom" + std::to_string(d) +
                                           tlds[d % 6]);

    Scenario sc;
    const struct {
        const char* op;
        CoordinationKernel kernel;
        double mix;
    } ops[3] = {
        {"op1", {CoordinationKernel::Family::Exponential, 0.8, 0.8}, 0.35},
        {"op2", {CoordinationKernel::Family::Lognormal, 3.0, 0.8}, 0.35},
        {"op3", {CoordinationKernel::Family::Exponential, 8.0, 0.8}, 0.35},
    };
    for (int k = 0; k < 3; ++k) {
        std::vector<std::string> io_pool;
        for (int d = 0; d < 40; ++d)
            io_pool.push_back(std::string(ops[k].op) + "x" + std::to_string(d) + ".news");
        for (int wave = 0; wave < 2; ++wave) {
            CampaignSpec c;
            c.name = std::string(ops[k].op) + (wave == 0 ? "a" : "b");
            c.num_accounts = 140;
            c.duration_days = 120.0;
            c.start_day = wave == 0 ? 0.0 : 150.0;
            c.io_domain_pool = io_pool;
            c.world = world;
            c.io_domain_mix = ops[k].mix;
            c.shared_zipf = 0.30;
            c.kernel = ops[k].kernel;
            c.shares_per_account = 60.0;
            c.organic_fraction = 0.15;
            c.sharers_per_source = 6.0;
            c.participation_spread = 0.5;
            c.cell_size = 10;
            c.seed = derive_seed(seed, c.name);
            sc.campaigns.push_back(std::move(c));
        }
        sc.operations.push_back({std::string(ops[k].op) + "a", std::string(ops[k].op) + "b"});
    }

    sc.baseline.num_accounts = 1160;
    sc.baseline.world = world;
    sc.baseline.activity_rate = 50.0;
    sc.baseline.hub_fraction = 0.06;
    sc.baseline.hub_multiplier = 2.0;
    sc.baseline.hub_burst_bias = 0.35;
    sc.baseline.pod_fraction = 0.10;
    sc.baseline.pod_urls = 25.0;
    sc.baseline.pod_scale_minutes = 5.0;
    sc.baseline.seed = derive_seed(seed, "baseline");

    sc.amplifiers.num_accounts = 140;
    sc.amplifiers.follow_prob = 0.5;
    sc.amplifiers.max_cells = 4;
    sc.amplifiers.reshares_per_cell = 45.0;
    sc.amplifiers.reshare_spread = 0.6;
    sc.amplifiers.scale_minutes = 8.0;
    sc.amplifiers.seed = derive_seed(seed, "amplifiers");
    return sc;
}

// ---- spec (de)serialization ----

inline nlohmann::json to_json(const CoordinationKernel& k) {
    return {{"family", k.family == CoordinationKernel::Family::Exponential
                           ? "exponential"
                           : "lognormal"},
            {"scale_minutes", k.scale_minutes},
            {"sigma", k.sigma}};
}

inline CoordinationKernel kernel_from_json(const nlohmann::json& j) {
    CoordinationKernel k;
    const auto family = j.at("family").get<std::string>();
    if (family == "exponential") k.family = CoordinationKernel::Family::Exponential;
    else if (family == "lognormal") k.family = CoordinationKernel::Family::Lognormal;
    else throw std::invalid_argument("unknown kernel family: " + family);
    k.scale_minutes = j.at("scale_minutes").get<double>();
    k.sigma = j.at("sigma").get<double>();
    return k;
}

inline nlohmann::json to_json(const OrganicWorld& w) {
    return {{"shared_domain_pool", w.shared_domain_pool},
            {"zipf_exponent", w.zipf_exponent},
            {"n_urls", w.n_urls},
            {"burst_fraction", w.burst_fraction},
            {"burst_scale_minutes", w.burst_scale_minutes},
            {"start_time", w.start_time},
            {"window_days", w.window_days},
            {"seed", w.seed}};
}

inline OrganicWorld world_from_json(const nlohmann::json& j) {
    OrganicWorld w;
    w.shared_domain_pool = j.at("shared_domain_pool").get<std::vector<std::string>>();
    w.zipf_exponent = j.at("zipf_exponent").get<double>();
    w.n_urls = j.at("n_urls").get<std::size_t>();
    w.burst_fraction = j.at("burst_fraction").get<double>();
    w.burst_scale_minutes = j.at("burst_scale_minutes").get<double>();
    w.start_time = j.at("start_time").get<std::int64_t>();
    w.window_days = j.at("window_days").get<double>();
    w.seed = j.at("seed").get<std::uint64_t>();
    return w;
}

inline nlohmann::json to_json(const CampaignSpec& c) {
    return {{"name", c.name},
            {"num_accounts", c.num_accounts},
            {"duration_days", c.duration_days},
            {"start_day", c.start_day},
            {"io_domain_pool", c.io_domain_pool},
            {"world", to_json(c.world)},
            {"io_domain_mix", c.io_domain_mix},
            {"shared_zipf", c.shared_zipf},
            {"kernel", to_json(c.kernel)},
            {"shares_per_account", c.shares_per_account},
            {"organic_fraction", c.organic_fraction},
            {"sharers_per_source", c.sharers_per_source},
            {"participation_spread", c.participation_spread},
            {"cell_size", c.cell_size},
            {"seed", c.seed}};
}

inline CampaignSpec campaign_from_json(const nlohmann::json& j) {
    CampaignSpec c;
    c.name = j.at("name").get<std::string>();
    c.num_accounts = j.at("num_accounts").get<std::size_t>();
    c.duration_days = j.at("duration_days").get<double>();
    c.start_day = j.at("start_day").get<double>();
    c.io_domain_pool = j.at("io_domain_pool").get<std::vector<std::string>>();
    c.world = world_from_json(j.at("world"));
    c.io_domain_mix = j.at("io_domain_mix").get<double>();
    c.shared_zipf = j.value("shared_zipf", c.shared_zipf);
    c.kernel = kernel_from_json(j.at("kernel"));
    c.shares_per_account = j.at("shares_per_account").get<double>();
    c.organic_fraction = j.at("organic_fraction").get<double>();
    c.sharers_per_source = j.at("sharers_per_source").get<double>();
    c.participation_spread = j.at("participation_spread").get<double>();
    c.cell_size = j.value("cell_size", c.cell_size);
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

inline nlohmann::json to_json(const BaselineSpec& b) {
    return {{"num_accounts", b.num_accounts}, {"world", to_json(b.world)},
            {"activity_rate", b.activity_rate}, {"hub_fraction", b.hub_fraction},
            {"hub_multiplier", b.hub_multiplier}, {"hub_burst_bias", b.hub_burst_bias},
            {"pod_fraction", b.pod_fraction},    {"pod_urls", b.pod_urls},
            {"pod_scale_minutes", b.pod_scale_minutes}, {"seed", b.seed}};
}

inline BaselineSpec baseline_from_json(const nlohmann::json& j) {
    BaselineSpec b;
    b.num_accounts = j.at("num_accounts").get<std::size_t>();
    b.world = world_from_json(j.at("world"));
    b.activity_rate = j.at("activity_rate").get<double>();
    b.hub_fraction = j.at("hub_fraction").get<double>();
    b.hub_multiplier = j.at("hub_multiplier").get<double>();
    b.hub_burst_bias = j.at("hub_burst_bias").get<double>();
    b.pod_fraction = j.value("pod_fraction", b.pod_fraction);
    b.pod_urls = j.value("pod_urls", b.pod_urls);
    b.pod_scale_minutes = j.value("pod_scale_minutes", b.pod_scale_minutes);
    b.seed = j.at("seed").get<std::uint64_t>();
    return b;
}

inline nlohmann::json to_json(const AmplifierSpec& a) {
    return {{"num_accounts", a.num_accounts},
            {"follow_prob", a.follow_prob},
            {"max_cells", a.max_cells},
            {"reshares_per_cell", a.reshares_per_cell},
            {"reshare_spread", a.reshare_spread},
            {"scale_minutes", a.scale_minutes},
            {"seed", a.seed}};
}

inline AmplifierSpec amplifier_from_json(const nlohmann::json& j) {
    AmplifierSpec a;
    a.num_accounts = j.at("num_accounts").get<std::size_t>();
    a.follow_prob = j.at("follow_prob").get<double>();
    a.max_cells = j.value("max_cells", a.max_cells);
    a.reshares_per_cell = j.at("reshares_per_cell").get<double>();
    a.reshare_spread = j.value("reshare_spread", a.reshare_spread);
    a.scale_minutes = j.at("scale_minutes").get<double>();
    a.seed = j.at("seed").get<std::uint64_t>();
    return a;
}

}  // namespace coordgraph::synth

#endif

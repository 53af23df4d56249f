#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "coordgraph/common.hpp"
#include "coordgraph/courl.hpp"
#include "coordgraph/synth.hpp"

using namespace coordgraph;
using namespace coordgraph::synth;

namespace {

CampaignSpec small_campaign(double kernel_scale, std::uint64_t seed,
                            double io_mix = 0.3) {
    CampaignSpec c;
    c.name = "camp";
    c.num_accounts = 30;
    c.duration_days = 60.0;
    for (int d = 0; d < 10; ++d) c.io_domain_pool.push_back("io" + std::to_string(d) + ".net");
    for (int d = 0; d < 50; ++d)
        c.world.shared_domain_pool.push_back("s" + std::to_string(d) + ".com");
    c.world.n_urls = 2000;
    c.world.seed = 77;
    c.io_domain_mix = io_mix;
    c.kernel.scale_minutes = kernel_scale;
    c.shares_per_account = 40.0;
    c.sharers_per_source = 8.0;
    c.seed = seed;
    return c;
}

Corpus corpus_of(const std::vector<ShareEvent>& events, const std::string& campaign,
                 int label) {
    std::ostringstream text;
    text << "account_id,timestamp,url,label,campaign\n";
    for (const auto& e : events)
        text << e.account_id << "," << e.timestamp << "," << e.url << "," << label << ","
             << campaign << "\n";
    std::istringstream in(text.str());
    return parse_events(in);
}

double bin1_fraction(const CampaignSpec& spec) {
    Corpus c = corpus_of(generate_campaign(spec), spec.name, 1);
    CoUrlMap map = compute_courls(c);
    std::uint64_t bin1 = 0, total = 0;
    for (const auto& [k, v] : map.pairs) {
        bin1 += v.bins[0];
        total += v.total();
    }
    return total == 0 ? 0.0 : static_cast<double>(bin1) / static_cast<double>(total);
}

double gini(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    double cum = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cum += x[i];
        weighted += x[i] * static_cast<double>(i + 1);
    }
    const double n = static_cast<double>(x.size());
    return cum == 0.0 ? 0.0 : (2.0 * weighted / (n * cum)) - (n + 1.0) / n;
}

}  // namespace

TEST_CASE("campaign generation is deterministic and respects the io mix") {
    CampaignSpec spec = small_campaign(1.0, 5);
    auto e1 = generate_campaign(spec);
    auto e2 = generate_campaign(spec);
    REQUIRE(e1.size() == e2.size());
    for (std::size_t i = 0; i < e1.size(); ++i) {
        CHECK(e1[i].account_id == e2[i].account_id);
        CHECK(e1[i].timestamp == e2[i].timestamp);
        CHECK(e1[i].url == e2[i].url);
    }

    // io_domain_mix = 0: no campaign-exclusive domains appear
    CampaignSpec pure = small_campaign(1.0, 6, 0.0);
    for (const auto& ev : generate_campaign(pure))
        CHECK(ev.url.find(".net") == std::string::npos);

    // different seed, different stream
    CampaignSpec other = small_campaign(1.0, 7);
    auto e3 = generate_campaign(other);
    bool any_differ = e3.size() != e1.size();
    for (std::size_t i = 0; !any_differ && i < std::min(e1.size(), e3.size()); ++i)
        any_differ = e1[i].url != e3[i].url || e1[i].timestamp != e3[i].timestamp;
    CHECK(any_differ);
}

TEST_CASE("tight kernels concentrate co-url mass in the first bin") {
    CHECK(bin1_fraction(small_campaign(0.5, 11)) > 0.5);
}

TEST_CASE("kernel scale dial monotonically drains near-simultaneous mass") {
    // averaged over seeds, larger scale -> smaller bin-1 fraction
    auto mean_fraction = [&](double scale) {
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed)
            total += bin1_fraction(small_campaign(scale, 100 + seed));
        return total / 10.0;
    };
    const double f_fast = mean_fraction(0.5);
    const double f_mid = mean_fraction(5.0);
    const double f_slow = mean_fraction(50.0);
    CHECK(f_fast > f_mid);
    CHECK(f_mid > f_slow);
}

TEST_CASE("baseline activity is organic") {
    BaselineSpec spec;
    spec.num_accounts = 40;
    for (int d = 0; d < 50; ++d)
        spec.world.shared_domain_pool.push_back("s" + std::to_string(d) + ".com");
    spec.world.n_urls = 3000;
    spec.world.burst_fraction = 0.0;  // pure organic: no bursts at all
    spec.world.seed = 3;
    spec.activity_rate = 30.0;
    spec.hub_fraction = 0.0;
    spec.seed = 21;

    auto events = generate_baseline(spec);
    CHECK(events.size() > 500);

    // same url shared by two accounts is almost never a co-URL inside 100 min
    Corpus c = corpus_of(events, "baseline", 0);
    CoUrlMap map = compute_courls(c);
    std::uint64_t courls = 0;
    for (const auto& [k, v] : map.pairs) courls += v.total();
    std::size_t repeat_urls = 0;
    std::map<std::string, int> url_counts;
    for (const auto& e : events) url_counts[e.url]++;
    for (const auto& [url, n] : url_counts)
        if (n > 1) ++repeat_urls;
    CHECK(repeat_urls > 50);              // plenty of shared urls...
    CHECK(courls < repeat_urls / 5 + 5);  // ...but almost none inside the window

    // activity rate zero produces nothing
    BaselineSpec idle = spec;
    idle.activity_rate = 0.0;
    CHECK(generate_baseline(idle).empty());
}

TEST_CASE("zipf exponent concentrates domain counts") {
    auto domain_gini = [](double exponent, std::uint64_t seed) {
        BaselineSpec spec;
        spec.num_accounts = 30;
        for (int d = 0; d < 60; ++d)
            spec.world.shared_domain_pool.push_back("s" + std::to_string(d) + ".com");
        spec.world.n_urls = 4000;
        spec.world.zipf_exponent = exponent;
        spec.world.seed = seed;
        spec.activity_rate = 40.0;
        spec.seed = seed + 1;
        std::map<std::string, double> counts;
        for (const auto& e : generate_baseline(spec))
            counts[extract_domain(e.url)] += 1.0;
        std::vector<double> x;
        for (const auto& [d, n] : counts) x.push_back(n);
        return gini(std::move(x));
    };
    double low = 0.0, high = 0.0;
    for (std::uint64_t s = 0; s < 8; ++s) {
        low += domain_gini(0.5, 40 + s);
        high += domain_gini(1.4, 40 + s);
    }
    CHECK(high > low);
}

TEST_CASE("three-ops scenario layout and spec round trips") {
    Scenario sc = scenario("three-ops", 9);
    CHECK(sc.campaigns.size() == 6);
    CHECK(sc.operations.size() == 3);

    // waves of one operation share io pools; operations have disjoint pools
    std::set<std::string> pool0(sc.campaigns[0].io_domain_pool.begin(),
                                sc.campaigns[0].io_domain_pool.end());
    std::set<std::string> pool1(sc.campaigns[1].io_domain_pool.begin(),
                                sc.campaigns[1].io_domain_pool.end());
    CHECK(pool0 == pool1);
    for (const auto& d : sc.campaigns[2].io_domain_pool) CHECK(pool0.count(d) == 0);

    // all campaigns and the baseline share one organic world
    for (const auto& c : sc.campaigns) {
        CHECK(c.world.seed == sc.baseline.world.seed);
        CHECK(c.world.shared_domain_pool == sc.baseline.world.shared_domain_pool);
    }

    // temporal waves are offset
    CHECK(sc.campaigns[0].start_day < sc.campaigns[1].start_day);

    CHECK_THROWS_AS(scenario("nope"), std::invalid_argument);

    // json round trips
    CampaignSpec c = sc.campaigns[3];
    CampaignSpec c2 = campaign_from_json(to_json(c));
    CHECK(to_json(c2) == to_json(c));
    BaselineSpec b2 = baseline_from_json(to_json(sc.baseline));
    CHECK(to_json(b2) == to_json(sc.baseline));
}

TEST_CASE("operations are independent: no cross-operation co-urls") {
    Scenario sc = scenario("three-ops", 13);
    // shrink for test speed
    for (auto& c : sc.campaigns) {
        c.num_accounts = 20;
        c.shares_per_account = 20.0;
        c.world.n_urls = 3000;
    }
    sc.baseline.num_accounts = 20;
    sc.baseline.world.n_urls = 3000;

    std::ostringstream text;
    text << "account_id,timestamp,url,label,campaign\n";
    for (const auto& c : sc.campaigns)
        for (const auto& e : generate_campaign(c))
            text << e.account_id << "," << e.timestamp << "," << e.url << ",1," << c.name
                 << "\n";
    for (const auto& e : generate_baseline(sc.baseline))
        text << e.account_id << "," << e.timestamp << "," << e.url << ",0,baseline\n";
    std::istringstream in(text.str());
    Corpus corpus = parse_events(in);

    CoUrlMap map = compute_courls(corpus);
    auto near = cross_campaign_matrix(
        map, corpus, {"op1a", "op2a", "op3a", "baseline"}, true);
    // near-simultaneous cross-operation rates do not exceed the organic
    // baseline-baseline rate (block-diagonal coordination structure)
    const double base_rate = near.value[3][3];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            if (a == b) continue;
            CHECK(near.value[a][b] <= base_rate + 1e-9);
        }
    // intra-operation coordination dwarfs the baseline rate
    CHECK(near.value[0][0] > 10.0 * (base_rate + 1e-12));
}

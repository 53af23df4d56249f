#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "coordgraph/common.hpp"
#include "coordgraph/courl.hpp"

using namespace coordgraph;

namespace {

Corpus corpus_from_rows(const std::vector<std::tuple<std::string, std::int64_t, std::string>>& rows) {
    std::string text = "account_id,timestamp,url,label,campaign\n";
    for (const auto& [id, ts, url] : rows)
        text += id + "," + std::to_string(ts) + "," + url + ",1,camp\n";
    std::istringstream in(text);
    return parse_events(in);
}

/// Independent oracle: O(n^2 m^2) enumeration over all event pairs.
CoUrlMap brute_force_courls(const Corpus& corpus, int window_minutes = 100) {
    CoUrlMap map;
    const std::int64_t window_s = static_cast<std::int64_t>(window_minutes) * 60;
    for (std::uint32_t a = 0; a < corpus.size(); ++a)
        for (std::uint32_t b = 0; b < corpus.size(); ++b) {
            if (a == b) continue;
            for (const auto& ea : corpus.accounts[a].events)
                for (const auto& eb : corpus.accounts[b].events) {
                    if (ea.url != eb.url) continue;
                    const std::int64_t dt = eb.timestamp - ea.timestamp;
                    if (dt < 0 || dt > window_s) continue;
                    bool leads;
                    if (dt > 0) leads = true;
                    else
                        leads = corpus.accounts[a].account_id <
                                corpus.accounts[b].account_id;
                    if (!leads) continue;
                    const int tau = dt == 0 ? 1 : static_cast<int>((dt + 59) / 60);
                    map.pairs[pair_key(a, b)].bins[tau - 1]++;
                }
        }
    return map;
}

bool maps_equal(const CoUrlMap& x, const CoUrlMap& y) {
    if (x.pairs.size() != y.pairs.size()) return false;
    for (const auto& [k, v] : x.pairs) {
        auto it = y.pairs.find(k);
        if (it == y.pairs.end() || it->second.bins != v.bins) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("co-url binning matches the stated interval convention") {
    // shares 30 s apart -> bin 1; 14.5 min apart -> bin 15; beyond window -> none
    Corpus c = corpus_from_rows({{"a", 0, "http://x.com/u"},
                                 {"b", 30, "http://x.com/u"},
                                 {"a", 10000, "http://y.com/u"},
                                 {"b", 10870, "http://y.com/u"},
                                 {"a", 100000, "http://z.com/u"},
                                 {"b", 106030, "http://z.com/u"}});
    CoUrlMap map = compute_courls(c);
    const auto* ab = map.find(0, 1);
    REQUIRE(ab != nullptr);
    CHECK(ab->bins[0] == 1);   // 30 s
    CHECK(ab->bins[14] == 1);  // 14.5 min -> tau = 15
    CHECK(ab->total() == 2);   // 100.5 min pair contributes nothing
}

TEST_CASE("simultaneous shares land in bin 1 with lexicographic leader") {
    Corpus c = corpus_from_rows({{"b", 50, "http://x.com/u"}, {"a", 50, "http://x.com/u"}});
    CoUrlMap map = compute_courls(c);
    const auto a = *c.index_of("a");
    const auto b = *c.index_of("b");
    REQUIRE(map.find(a, b) != nullptr);
    CHECK(map.find(a, b)->bins[0] == 1);
    CHECK(map.find(b, a) == nullptr);
}

TEST_CASE("five-account clique within a minute fills all ten pairs") {
    std::vector<std::tuple<std::string, std::int64_t, std::string>> rows;
    for (int i = 0; i < 5; ++i)
        rows.emplace_back("acc" + std::to_string(i), 10 * i, "http://x.com/u");
    Corpus c = corpus_from_rows(rows);
    CoUrlMap map = compute_courls(c);
    CHECK(map.pairs.size() == 10);
    for (const auto& [k, v] : map.pairs) CHECK(v.bins[0] == 1);
    CHECK(maps_equal(map, brute_force_courls(c)));
}

TEST_CASE("compute_courls equals the brute-force oracle on random corpora") {
    Rng rng(20240817);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n_accounts = 2 + rng.uniform_index(9);
        const std::size_t n_events = 1 + rng.uniform_index(50);
        std::vector<std::tuple<std::string, std::int64_t, std::string>> rows;
        for (std::size_t e = 0; e < n_events; ++e) {
            const auto acc = "a" + std::to_string(rng.uniform_index(n_accounts));
            const auto url = "http://d" + std::to_string(rng.uniform_index(4)) + ".com/u" +
                             std::to_string(rng.uniform_index(6));
            rows.emplace_back(acc, static_cast<std::int64_t>(rng.uniform_index(9000)), url);
        }
        Corpus c = corpus_from_rows(rows);
        CHECK(maps_equal(compute_courls(c), brute_force_courls(c)));
    }
}

TEST_CASE("event input order never changes the result") {
    Rng rng(7);
    std::vector<std::tuple<std::string, std::int64_t, std::string>> rows;
    for (int e = 0; e < 40; ++e)
        rows.emplace_back("a" + std::to_string(rng.uniform_index(6)),
                          static_cast<std::int64_t>(rng.uniform_index(4000)),
                          "http://d.com/u" + std::to_string(rng.uniform_index(5)));
    Corpus c1 = corpus_from_rows(rows);
    rng.shuffle(rows);
    Corpus c2 = corpus_from_rows(rows);
    CHECK(maps_equal(compute_courls(c1), compute_courls(c2)));
}

TEST_CASE("symmetrize adds both orientations and preserves pair mass") {
    CoUrlMap directed;
    directed.pairs[pair_key(0, 1)].bins[0] = 3;
    directed.pairs[pair_key(1, 0)].bins[0] = 1;
    directed.pairs[pair_key(2, 3)].bins[5] = 7;

    CoUrlMap sym = symmetrize(directed);
    CHECK(sym.find(0, 1)->bins[0] == 4);
    CHECK(sym.find(1, 0)->bins[0] == 4);
    CHECK(sym.find(2, 3)->bins[5] == 7);
    CHECK(sym.find(3, 2)->bins[5] == 7);

    // applying the rule twice would double counts; the state flag forbids it
    CHECK_THROWS_AS(symmetrize(sym), std::logic_error);
}

TEST_CASE("campaign cdf is monotone and ends at one") {
    Corpus c = corpus_from_rows({{"a", 0, "http://x.com/u"},
                                 {"b", 30, "http://x.com/u"},
                                 {"a", 50000, "http://y.com/u"},
                                 {"b", 50600, "http://y.com/u"}});
    CoUrlMap map = compute_courls(c);
    CoordinationCdf cdf = campaign_cdf(map, c, "camp");
    REQUIRE_FALSE(cdf.degenerate);
    for (int t = 1; t < kCoUrlBins; ++t) CHECK(cdf.value[t] >= cdf.value[t - 1]);
    CHECK(cdf.value[kCoUrlBins - 1] == Catch::Approx(1.0));
    CHECK(cdf.value[0] == Catch::Approx(0.5));   // one of two co-URLs in bin 1
    CHECK(cdf.value[9] == Catch::Approx(1.0));   // second at tau = 10

    CoordinationCdf none = campaign_cdf(map, c, "other");
    CHECK(none.degenerate);
}

TEST_CASE("cdf distances match their definitions") {
    CoordinationCdf step, uniform;
    for (int t = 0; t < kCoUrlBins; ++t) {
        step.value[t] = 1.0;
        uniform.value[t] = static_cast<double>(t + 1) / kCoUrlBins;
    }
    CHECK(cdf_distance(step, step, CdfMetric::MAD) == 0.0);
    CHECK(cdf_distance(step, step, CdfMetric::KS) == 0.0);
    CHECK(cdf_distance(step, step, CdfMetric::MSD) == 0.0);

    // max gap at tau = 1: |1 - 0.01| = 0.99
    CHECK(cdf_distance(step, uniform, CdfMetric::KS) == Catch::Approx(0.99));

    // symmetry on random cdf pairs
    Rng rng(3);
    CoordinationCdf ra, rb;
    double ca = 0.0, cb = 0.0;
    for (int t = 0; t < kCoUrlBins; ++t) {
        ca += rng.uniform01();
        cb += rng.uniform01();
        ra.value[t] = ca;
        rb.value[t] = cb;
    }
    for (int t = 0; t < kCoUrlBins; ++t) {
        ra.value[t] /= ca;
        rb.value[t] /= cb;
    }
    for (auto metric : {CdfMetric::MAD, CdfMetric::KS, CdfMetric::MSD})
        CHECK(cdf_distance(ra, rb, metric) == Catch::Approx(cdf_distance(rb, ra, metric)));

    CoordinationCdf degenerate;
    degenerate.degenerate = true;
    CHECK_THROWS_AS(cdf_distance(step, degenerate, CdfMetric::MAD), std::invalid_argument);
}

TEST_CASE("cross-campaign matrix normalizes by subset sizes") {
    // A has 2 accounts, B has 5; a single leading pair with 10 co-URLs
    std::string text = "account_id,timestamp,url,label,campaign\n";
    for (int i = 0; i < 2; ++i)
        text += "a" + std::to_string(i) + ",0,http://seed.com/a" + std::to_string(i) +
                ",1,A\n";
    for (int i = 0; i < 5; ++i)
        text += "b" + std::to_string(i) + ",1,http://seed.com/b" + std::to_string(i) +
                ",1,B\n";
    for (int k = 0; k < 10; ++k) {
        text += "a0," + std::to_string(10000 + 1000 * k) + ",http://x.com/u" +
                std::to_string(k) + ",1,A\n";
        text += "b0," + std::to_string(10030 + 1000 * k) + ",http://x.com/u" +
                std::to_string(k) + ",1,B\n";
    }
    std::istringstream in(text);
    Corpus c = parse_events(in);
    CoUrlMap map = compute_courls(c);

    auto m = cross_campaign_matrix(map, c, {"A", "B"}, false);
    CHECK(m.value[0][1] == Catch::Approx(10.0 / 10.0));
    CHECK(m.value[1][0] == Catch::Approx(0.0));

    auto near = cross_campaign_matrix(map, c, {"A", "B"}, true);
    CHECK(near.value[0][1] == Catch::Approx(1.0));  // all shares 30 s apart

    auto geo = cross_campaign_matrix(map, c, {"A", "B"}, false,
                                     MatrixNormalization::GeometricMean);
    CHECK(geo.value[0][1] == Catch::Approx(10.0 / std::sqrt(10.0)));

    auto empty = cross_campaign_matrix(map, c, {"A", "B", "C"}, false);
    CHECK(empty.empty_flag[0][2]);
    CHECK(empty.value[0][2] == 0.0);
}

TEST_CASE("per-account stats count totals and distinct partners") {
    Corpus c = corpus_from_rows({{"a", 0, "http://x.com/u"},
                                 {"b", 30, "http://x.com/u"},
                                 {"c", 40, "http://x.com/u"},
                                 {"a", 5000, "http://y.com/u"},
                                 {"b", 5030, "http://y.com/u"}});
    CoUrlMap map = compute_courls(c);
    auto stats = per_account_courl_stats(map, c.size());
    const auto a = *c.index_of("a");
    const auto b = *c.index_of("b");
    const auto cc = *c.index_of("c");
    CHECK(stats.courls[a] == 3);
    CHECK(stats.neighbors[a] == 2);
    CHECK(stats.courls[b] == 3);
    CHECK(stats.neighbors[cc] == 2);

    // symmetrized stats agree
    auto sym_stats = per_account_courl_stats(symmetrize(map), c.size());
    CHECK(sym_stats.courls == stats.courls);
    CHECK(sym_stats.neighbors == stats.neighbors);
}

#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <sstream>

#include "coordgraph/censor.hpp"

using namespace coordgraph;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DomainFrequencyTable table_of(
    const std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>>& rows) {
    DomainFrequencyTable t;
    for (const auto& [domain, f0, f1] : rows) {
        if (f0) t.add(domain, 0, f0);
        if (f1) t.add(domain, 1, f1);
    }
    return t;
}

}  // namespace

TEST_CASE("term frequencies normalize per class") {
    auto t = table_of({{"a", 1, 3}, {"b", 3, 1}});
    auto tf = term_frequencies(t);
    REQUIRE(tf.domains == std::vector<std::string>{"a", "b"});
    CHECK(tf.tf1[0] == Catch::Approx(0.75));
    CHECK(tf.tf1[1] == Catch::Approx(0.25));
    CHECK(tf.tf0[0] == Catch::Approx(0.25));
    CHECK(tf.tf0[1] == Catch::Approx(0.75));

    auto single = table_of({{"only", 2, 9}});
    auto stf = term_frequencies(single);
    CHECK(stf.tf0[0] == 1.0);
    CHECK(stf.tf1[0] == 1.0);

    DomainFrequencyTable empty_class;
    empty_class.add("a", 1, 5);
    CHECK_THROWS_AS(term_frequencies(empty_class), std::runtime_error);
}

TEST_CASE("tf vectors sum to one on random tables") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        DomainFrequencyTable t;
        const std::size_t n = 1 + rng.uniform_index(30);
        for (std::size_t d = 0; d < n; ++d) {
            t.add("d" + std::to_string(d), 0, rng.uniform_index(50));
            t.add("d" + std::to_string(d), 1, rng.uniform_index(50));
        }
        t.add("anchor", 0, 1);
        t.add("anchor", 1, 1);
        auto tf = term_frequencies(t);
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t i = 0; i < tf.domains.size(); ++i) {
            s0 += tf.tf0[i];
            s1 += tf.tf1[i];
        }
        CHECK(s0 == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(s1 == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gamma ratio handles the limit conventions") {
    CHECK(gamma_ratio({0.5, 0.5}, {0.5, 0.5}) == std::vector<double>{1.0, 1.0});

    auto g = gamma_ratio({0.3, 0.0, 0.0}, {0.0, 0.4, 0.0});
    CHECK(g[0] == kInf);  // IO-exclusive
    CHECK(g[1] == 0.0);   // baseline-exclusive
    CHECK(g[2] == 0.0);   // absent everywhere
}

TEST_CASE("censor_and_select honors gamma_max boundaries and top-k") {
    // io-only domain censored for any finite gamma_max
    auto t = table_of({{"ioonly", 0, 50}, {"both", 40, 40}, {"baseonly", 60, 0}});

    auto all = censor_and_select(t, {kInf, 10});
    CHECK(all.retained == std::vector<std::string>{"both", "baseonly", "ioonly"});

    auto strict = censor_and_select(t, {0.0, 10});
    CHECK(strict.retained == std::vector<std::string>{"baseonly"});

    auto finite = censor_and_select(t, {1e6, 10});
    CHECK(std::find(finite.retained.begin(), finite.retained.end(), "ioonly") ==
          finite.retained.end());

    // top-k truncation by descending total count
    auto big = table_of({{"a", 60, 40}, {"b", 30, 20}, {"c", 6, 4}});
    auto top2 = censor_and_select(big, {kInf, 2});
    CHECK(top2.retained == std::vector<std::string>{"a", "b"});

    // tie broken lexicographically
    auto tie = table_of({{"zz", 10, 0}, {"aa", 10, 0}, {"mm", 10, 0}, {"io", 0, 1}});
    auto pick = censor_and_select(tie, {kInf, 2});
    CHECK(pick.retained == std::vector<std::string>{"aa", "mm"});

    auto none = table_of({{"ioonly", 0, 50}, {"anchor", 1, 1}});
    CHECK_THROWS_AS(censor_and_select(none, {0.0, 10}), std::runtime_error);
}

TEST_CASE("gamma_max monotonicity: retained sets nest before top-k") {
    Rng rng(5);
    DomainFrequencyTable t;
    for (int d = 0; d < 40; ++d)
        t.add("d" + std::to_string(d), rng.uniform_index(2),
              1 + rng.uniform_index(99));
    t.add("anchor0", 0, 5);
    t.add("anchor1", 1, 5);
    const std::size_t huge_k = 1000;  // disable top-k so only gamma acts
    std::vector<double> gammas = {0.0, 0.5, 1.0, 2.0, kInf};
    std::vector<std::set<std::string>> retained;
    for (double g : gammas) {
        auto v = censor_and_select(t, {g, huge_k});
        retained.emplace_back(v.retained.begin(), v.retained.end());
    }
    for (std::size_t i = 1; i < retained.size(); ++i)
        for (const auto& d : retained[i - 1]) CHECK(retained[i].count(d) == 1);
}

TEST_CASE("content features count vocabulary domains and standardize on train") {
    std::string text = "account_id,timestamp,url,label,campaign\n";
    // t0/t1 in train, v0 in val; d.com in vocabulary, x.com censored out
    for (int i = 0; i < 5; ++i)
        text += "t0," + std::to_string(10 * i) + ",http://d.com/u" + std::to_string(i) +
                ",1,camp\n";
    text += "t1,5,http://x.com/u,0,baseline\n";
    text += "t1,6,http://d.com/z,0,baseline\n";
    text += "v0,7,http://x.com/q,0,baseline\n";
    std::istringstream in(text);
    Corpus c = parse_events(in);
    TaskDescriptor td;  // not used; assign splits manually
    c.split = {Split::Train, Split::Train, Split::Val};

    auto fs = build_content_features(c, {"d.com"});
    const auto t0 = *c.index_of("t0");
    const auto t1 = *c.index_of("t1");
    const auto v0 = *c.index_of("v0");
    CHECK(fs.raw[t0][0] == 5.0);
    CHECK(fs.raw[t1][0] == 1.0);
    CHECK(fs.raw[v0][0] == 0.0);  // only censored domains -> zero vector

    // train column standardizes to mean 0, population stdev 1
    const double z0 = fs.standardized(t0, 0);
    const double z1 = fs.standardized(t1, 0);
    CHECK(z0 + z1 == Catch::Approx(0.0).margin(1e-9));
    CHECK(z0 * z0 + z1 * z1 == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("vocabulary is a pure function of the training split") {
    std::string text = "account_id,timestamp,url,label,campaign\n";
    Rng rng(17);
    for (int a = 0; a < 8; ++a)
        for (int e = 0; e < 6; ++e)
            text += "a" + std::to_string(a) + "," + std::to_string(100 * a + e) +
                    ",http://d" + std::to_string(rng.uniform_index(6)) + ".com/u" +
                    std::to_string(e) + "," + (a < 4 ? "1,camp" : "0,baseline") + "\n";
    std::istringstream in(text);
    Corpus c = parse_events(in);
    c.split.assign(c.size(), Split::Train);
    c.split[6] = Split::Test;
    c.split[7] = Split::Test;

    auto freq1 = domain_frequencies(c, Split::Train);
    auto v1 = censor_and_select(freq1, {kInf, 100});

    // scrambling the test accounts' events must not change the vocabulary
    std::swap(c.accounts[6].events, c.accounts[7].events);
    auto freq2 = domain_frequencies(c, Split::Train);
    auto v2 = censor_and_select(freq2, {kInf, 100});
    CHECK(v1.retained == v2.retained);
}

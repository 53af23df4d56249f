#ifndef COORDGRAPH_EVENTS_HPP
#define COORDGRAPH_EVENTS_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "coordgraph/common.hpp"
#include "coordgraph/csv.hpp"
#include "coordgraph/psl.hpp"

#include <json.hpp>

namespace coordgraph {

constexpr const char* kBaselineCampaign = "baseline";

struct ShareEvent {
    std::string account_id;
    std::int64_t timestamp = 0;  // seconds since epoch, UTC
    std::string url;
    std::string domain;  // registered domain, lowercase; "" if unparseable
};

struct AccountRecord {
    std::string account_id;
    int label = 0;  // 1 = influence operation
    std::string campaign;
    std::vector<ShareEvent> events;  // sorted by timestamp
    std::int64_t first_active = 0;
    std::int64_t last_active = 0;
};

enum class Split { Unassigned, Train, Val, Test, Excluded };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        case Split::Excluded: return "excluded";
        default: return "unassigned";
    }
}

/// Accounts are kept sorted by id; the position in `accounts` is the node
/// index used by every downstream module.
struct Corpus {
    std::vector<AccountRecord> accounts;
    std::vector<Split> split;  // aligned with accounts; empty until assigned
    std::size_t rejected_rows = 0;

    std::size_t size() const { return accounts.size(); }

    std::optional<std::uint32_t> index_of(const std::string& account_id) const {
        auto it = index_.find(account_id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    void rebuild_index() {
        index_.clear();
        index_.reserve(accounts.size());
        for (std::uint32_t i = 0; i < accounts.size(); ++i)
            index_.emplace(accounts[i].account_id, i);
    }

    std::vector<std::uint32_t> indices_in(Split s) const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < split.size(); ++i)
            if (split[i] == s) out.push_back(i);
        return out;
    }

private:
    std::unordered_map<std::string, std::uint32_t> index_;
};

struct InclusionCriteria {
    std::int64_t min_active_days = 90;
    std::size_t min_tweets = 300;
    std::size_t min_url_shares = 200;
    std::size_t min_unique_domains = 5;
    std::uint64_t min_courls = 10;
    std::size_t min_neighbors = 2;
};

/// Registered domain of a URL (effective TLD plus one), lowercased.
/// Unparseable input yields "" and the event is treated as having no domain.
inline std::string extract_domain(const std::string& url) {
    if (url.empty()) return "";
    return psl::registered_domain_of_host(psl::host_of_url(url));
}

namespace detail {

inline bool parse_int64(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-') {
        neg = true;
        i = 1;
        if (s.size() == 1) return false;
    }
    std::int64_t v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = neg ? -v : v;
    return true;
}

}  // namespace detail

/// Parses the events CSV (header: account_id,timestamp,url,label,campaign).
/// Malformed rows are dropped and tallied in Corpus::rejected_rows; an
/// unreadable stream is fatal. Events are grouped per account and sorted.
inline Corpus parse_events(std::istream& in) {
    csv::Table table = csv::read_table(in);
    if (table.header != std::vector<std::string>{"account_id", "timestamp", "url",
                                                 "label", "campaign"} &&
        !table.header.empty() && !table.rows.empty()) {
        // tolerate any header as long as the column count matches
        if (table.header.size() != 5)
            throw std::runtime_error("events csv: expected 5 columns");
    }

    Corpus corpus;
    std::map<std::string, AccountRecord> by_account;  // ordered -> sorted output
    for (const auto& row : table.rows) {
        if (row.size() != 5) {
            ++corpus.rejected_rows;
            continue;
        }
        const std::string& id = row[0];
        std::int64_t ts = 0;
        if (id.empty() || !detail::parse_int64(row[1], ts) || ts < 0 || row[2].empty()) {
            ++corpus.rejected_rows;
            continue;
        }
        int label;
        if (row[3] == "0") label = 0;
        else if (row[3] == "1") label = 1;
        else {
            ++corpus.rejected_rows;
            continue;
        }
        const std::string& campaign = row[4];
        if (campaign.empty() || (label == 1) != (campaign != kBaselineCampaign)) {
            ++corpus.rejected_rows;
            continue;
        }
        auto [it, inserted] = by_account.try_emplace(id);
        AccountRecord& rec = it->second;
        if (inserted) {
            rec.account_id = id;
            rec.label = label;
            rec.campaign = campaign;
        } else if (rec.label != label || rec.campaign != campaign) {
            ++corpus.rejected_rows;  // account changed class mid-stream
            continue;
        }
        ShareEvent ev;
        ev.account_id = id;
        ev.timestamp = ts;
        ev.url = row[2];
        ev.domain = extract_domain(ev.url);
        rec.events.push_back(std::move(ev));
    }

    corpus.accounts.reserve(by_account.size());
    for (auto& [id, rec] : by_account) {
        std::stable_sort(rec.events.begin(), rec.events.end(),
                         [](const ShareEvent& a, const ShareEvent& b) {
                             return a.timestamp < b.timestamp;
                         });
        rec.first_active = rec.events.front().timestamp;
        rec.last_active = rec.events.back().timestamp;
        corpus.accounts.push_back(std::move(rec));
    }
    corpus.rebuild_index();
    return corpus;
}

/// Canonical serialization; parse(serialize(parse(x))) is a fixed point.
inline void serialize_events(const Corpus& corpus, std::ostream& out,
                             const std::string& config_hash = "") {
    csv::Writer w(out);
    if (!config_hash.empty()) w.comment("config_hash=" + config_hash);
    w.row({"account_id", "timestamp", "url", "label", "campaign"});
    for (const auto& rec : corpus.accounts) {
        const std::string label = rec.label ? "1" : "0";
        for (const auto& ev : rec.events)
            w.row({rec.account_id, std::to_string(ev.timestamp), ev.url, label,
                   rec.campaign});
    }
}

/// Per-account coordination totals needed by inclusion criterion (5);
/// computed by the coordination module and passed in here.
struct AccountCoUrlStats {
    std::vector<std::uint64_t> courls;      // total co-URL count per account index
    std::vector<std::size_t> neighbors;     // distinct co-sharing partners
};

/// Applies the five inclusion criteria ("at least" = inclusive thresholds).
/// Retained accounts keep their split slot as Unassigned; the rest are marked
/// Excluded. Pure in (corpus, criteria, stats), hence idempotent.
inline Corpus filter_accounts(const Corpus& corpus, const InclusionCriteria& criteria,
                              const AccountCoUrlStats& stats) {
    if (stats.courls.size() != corpus.size() || stats.neighbors.size() != corpus.size())
        throw std::invalid_argument("filter_accounts: stats not aligned with corpus");
    Corpus out;
    out.accounts = corpus.accounts;
    out.rejected_rows = corpus.rejected_rows;
    out.split.assign(corpus.size(), Split::Unassigned);
    const std::int64_t min_span = criteria.min_active_days * 86400;
    for (std::uint32_t i = 0; i < corpus.size(); ++i) {
        const AccountRecord& rec = corpus.accounts[i];
        std::size_t unique_domains = 0;
        {
            std::vector<std::string_view> ds;
            ds.reserve(rec.events.size());
            for (const auto& ev : rec.events)
                if (!ev.domain.empty()) ds.push_back(ev.domain);
            std::sort(ds.begin(), ds.end());
            unique_domains = std::unique(ds.begin(), ds.end()) - ds.begin();
        }
        const bool ok = (rec.last_active - rec.first_active) >= min_span &&
                        rec.events.size() >= criteria.min_tweets &&
                        rec.events.size() >= criteria.min_url_shares &&
                        unique_domains >= criteria.min_unique_domains &&
                        stats.courls[i] >= criteria.min_courls &&
                        stats.neighbors[i] >= criteria.min_neighbors;
        if (!ok) out.split[i] = Split::Excluded;
    }
    out.rebuild_index();
    return out;
}

/// One A_k / B_k subtask. A trains on the earlier campaign of operation k;
/// B trains on the earlier campaigns of every other operation. Validation and
/// test sampling depend only on (val/test campaign, seed), so a paired A_k
/// and B_k with the same seed get identical val/test account sets.
struct TaskDescriptor {
    std::string name;                          // e.g. "A1", "B2"
    std::vector<std::string> train_campaigns;  // IO campaigns providing train positives
    std::string val_campaign;                  // earlier campaign of operation k
    std::string test_campaign;                 // later campaign of operation k
    std::uint64_t seed = 0;
    double val_fraction = 0.2;   // of val_campaign accounts held out for validation
    double test_fraction = 1.0;  // of test_campaign accounts used for test
    double baseline_train = 0.6, baseline_val = 0.1, baseline_test = 0.3;
};

namespace detail {

inline std::vector<std::uint32_t> campaign_indices(const Corpus& corpus,
                                                   const std::string& campaign) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < corpus.size(); ++i) {
        if (!corpus.split.empty() && corpus.split[i] == Split::Excluded) continue;
        if (corpus.accounts[i].campaign == campaign) out.push_back(i);
    }
    return out;  // corpus order is sorted by id, so this is deterministic
}

}  // namespace detail

/// Computes the split assignment per the task descriptor. Anything not
/// selected is marked Excluded. Throws on unknown campaign tokens.
inline std::vector<Split> compute_split_assignment(const Corpus& corpus,
                                                   const TaskDescriptor& task) {
    std::vector<std::string> known;
    for (const auto& rec : corpus.accounts) known.push_back(rec.campaign);
    std::sort(known.begin(), known.end());
    known.erase(std::unique(known.begin(), known.end()), known.end());
    auto require_known = [&](const std::string& c) {
        if (!std::binary_search(known.begin(), known.end(), c))
            throw std::runtime_error("define_splits: unknown campaign '" + c + "'");
    };
    for (const auto& c : task.train_campaigns) require_known(c);
    require_known(task.val_campaign);
    require_known(task.test_campaign);

    std::vector<Split> split(corpus.size(), Split::Excluded);

    // val: seeded sample of the earlier campaign of operation k
    auto val_pool = detail::campaign_indices(corpus, task.val_campaign);
    {
        Rng rng(derive_seed(task.seed, "val:" + task.val_campaign));
        rng.shuffle(val_pool);
    }
    const std::size_t n_val =
        static_cast<std::size_t>(task.val_fraction * static_cast<double>(val_pool.size()) + 0.5);
    for (std::size_t i = 0; i < val_pool.size(); ++i)
        split[val_pool[i]] = i < n_val ? Split::Val : Split::Unassigned;

    // test: seeded sample of the later campaign
    auto test_pool = detail::campaign_indices(corpus, task.test_campaign);
    {
        Rng rng(derive_seed(task.seed, "test:" + task.test_campaign));
        rng.shuffle(test_pool);
    }
    const std::size_t n_test =
        static_cast<std::size_t>(task.test_fraction * static_cast<double>(test_pool.size()) + 0.5);
    for (std::size_t i = 0; i < n_test; ++i) split[test_pool[i]] = Split::Test;

    // train positives: every listed campaign, minus anything already in val/test
    for (const auto& campaign : task.train_campaigns)
        for (std::uint32_t i : detail::campaign_indices(corpus, campaign))
            if (split[i] != Split::Val && split[i] != Split::Test)
                split[i] = Split::Train;
    // leftover val-campaign accounts not reachable above stay Excluded
    for (std::uint32_t i : val_pool)
        if (split[i] == Split::Unassigned) split[i] = Split::Excluded;

    // baseline: one seeded shuffle shared by every task with the same seed
    auto base_pool = detail::campaign_indices(corpus, kBaselineCampaign);
    {
        Rng rng(derive_seed(task.seed, "baseline"));
        rng.shuffle(base_pool);
    }
    const auto n = static_cast<double>(base_pool.size());
    const auto n_btrain = static_cast<std::size_t>(task.baseline_train * n + 0.5);
    const auto n_bval = static_cast<std::size_t>(task.baseline_val * n + 0.5);
    const auto n_btest = static_cast<std::size_t>(task.baseline_test * n + 0.5);
    for (std::size_t i = 0; i < base_pool.size(); ++i) {
        Split s = Split::Excluded;
        if (i < n_btrain) s = Split::Train;
        else if (i < n_btrain + n_bval) s = Split::Val;
        else if (i < n_btrain + n_bval + n_btest) s = Split::Test;
        split[base_pool[i]] = s;
    }
    return split;
}

inline Corpus define_splits(const Corpus& corpus, const TaskDescriptor& task) {
    Corpus out;
    out.accounts = corpus.accounts;
    out.rejected_rows = corpus.rejected_rows;
    out.split = compute_split_assignment(corpus, task);
    out.rebuild_index();
    return out;
}

inline nlohmann::json split_manifest(const Corpus& corpus, const TaskDescriptor& task) {
    nlohmann::json j;
    j["task"] = task.name;
    j["seed"] = task.seed;
    for (auto [split, key] : {std::pair{Split::Train, "train"},
                              {Split::Val, "val"},
                              {Split::Test, "test"}}) {
        auto ids = nlohmann::json::array();
        for (std::uint32_t i : corpus.indices_in(split))
            ids.push_back(corpus.accounts[i].account_id);
        j[key] = std::move(ids);
    }
    return j;
}

}  // namespace coordgraph

#endif

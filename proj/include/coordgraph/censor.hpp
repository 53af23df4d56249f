#ifndef COORDGRAPH_CENSOR_HPP
#define COORDGRAPH_CENSOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "coordgraph/events.hpp"

namespace coordgraph {

/// Raw domain counts per class, accumulated over the training split only.
struct DomainFrequencyTable {
    // ordered map so every downstream ordering is deterministic
    std::map<std::string, std::array<std::uint64_t, 2>> counts;  // [y=0, y=1]
    std::uint64_t total[2] = {0, 0};

    void add(const std::string& domain, int label, std::uint64_t n = 1) {
        counts[domain][label] += n;
        total[label] += n;
    }
};

inline DomainFrequencyTable domain_frequencies(const Corpus& corpus, Split split) {
    DomainFrequencyTable table;
    for (std::uint32_t i = 0; i < corpus.size(); ++i) {
        if (corpus.split.empty() || corpus.split[i] != split) continue;
        const auto& rec = corpus.accounts[i];
        for (const auto& ev : rec.events)
            if (!ev.domain.empty()) table.add(ev.domain, rec.label);
    }
    return table;
}

struct CensorConfig {
    double gamma_max = 0.54;  // +inf disables censorship
    std::size_t k_top = 2500;
};

/// tf(i,y) = f_i^(y) / sum_i f_i^(y), per class. Fatal if a class total is 0.
struct TermFrequencies {
    std::vector<std::string> domains;  // sorted
    std::vector<double> tf0, tf1;
};

inline TermFrequencies term_frequencies(const DomainFrequencyTable& table) {
    if (table.total[0] == 0 || table.total[1] == 0)
        throw std::runtime_error("term_frequencies: empty class total");
    TermFrequencies tf;
    tf.domains.reserve(table.counts.size());
    for (const auto& [domain, c] : table.counts) {
        tf.domains.push_back(domain);
        tf.tf0.push_back(static_cast<double>(c[0]) / static_cast<double>(table.total[0]));
        tf.tf1.push_back(static_cast<double>(c[1]) / static_cast<double>(table.total[1]));
    }
    return tf;
}

/// gamma_i = tf(i,1) / tf(i,0), with x/0 = +inf for x > 0 and 0/0 = 0.
inline std::vector<double> gamma_ratio(const std::vector<double>& tf1,
                                       const std::vector<double>& tf0) {
    if (tf1.size() != tf0.size())
        throw std::invalid_argument("gamma_ratio: misaligned vocabularies");
    std::vector<double> gamma(tf1.size());
    for (std::size_t i = 0; i < tf1.size(); ++i) {
        if (tf0[i] > 0.0) gamma[i] = tf1[i] / tf0[i];
        else gamma[i] = tf1[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return gamma;
}

/// The retained vocabulary together with everything needed to audit it.
struct VocabularyEntry {
    std::string domain;
    double gamma = 0.0;
    std::uint64_t total_count = 0;
    bool censored = false;
};

struct CensoredVocabulary {
    std::vector<std::string> retained;       // descending total count, ties lexicographic
    std::vector<VocabularyEntry> audit;      // every domain seen in training
};

/// Censors domains with gamma_i > gamma_max, then keeps the k_top most
/// frequent survivors (training-split counts; ties broken lexicographically).
inline CensoredVocabulary censor_and_select(const DomainFrequencyTable& table,
                                            const CensorConfig& config) {
    if (config.k_top < 1) throw std::invalid_argument("censor_and_select: k_top < 1");
    TermFrequencies tf = term_frequencies(table);
    std::vector<double> gamma = gamma_ratio(tf.tf1, tf.tf0);

    CensoredVocabulary out;
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < tf.domains.size(); ++i) {
        const auto& c = table.counts.at(tf.domains[i]);
        VocabularyEntry e;
        e.domain = tf.domains[i];
        e.gamma = gamma[i];
        e.total_count = c[0] + c[1];
        e.censored = gamma[i] > config.gamma_max;
        if (!e.censored) survivors.push_back(i);
        out.audit.push_back(std::move(e));
    }
    if (survivors.empty())
        throw std::runtime_error(
            "censor_and_select: every domain censored; raise gamma_max or k_top");

    std::sort(survivors.begin(), survivors.end(), [&](std::size_t a, std::size_t b) {
        const auto ta = out.audit[a].total_count;
        const auto tb = out.audit[b].total_count;
        if (ta != tb) return ta > tb;
        return out.audit[a].domain < out.audit[b].domain;
    });
    if (survivors.size() > config.k_top) survivors.resize(config.k_top);
    out.retained.reserve(survivors.size());
    for (std::size_t i : survivors) out.retained.push_back(out.audit[i].domain);
    return out;
}

/// Per-account counts over a fixed vocabulary plus the train-split z-score
/// statistics used to standardize them.
struct CensoredFeatureSet {
    std::vector<std::string> retained_domains;
    std::vector<std::vector<double>> raw;  // [account][domain], aligned to corpus index
    std::vector<double> mean, stdev;       // train-split statistics per column

    double standardized(std::uint32_t account, std::size_t col) const {
        return (raw[account][col] - mean[col]) / stdev[col];
    }
};

/// Counts vocabulary domains per account (all splits) and fits the z-score
/// on the training rows. Constant columns get stdev 1 so they standardize
/// to zero instead of dividing by zero.
inline CensoredFeatureSet build_content_features(const Corpus& corpus,
                                                 const std::vector<std::string>& vocabulary) {
    CensoredFeatureSet fs;
    fs.retained_domains = vocabulary;
    std::unordered_map<std::string_view, std::size_t> col;
    for (std::size_t c = 0; c < vocabulary.size(); ++c) col[vocabulary[c]] = c;

    fs.raw.assign(corpus.size(), std::vector<double>(vocabulary.size(), 0.0));
    for (std::uint32_t i = 0; i < corpus.size(); ++i)
        for (const auto& ev : corpus.accounts[i].events) {
            if (ev.domain.empty()) continue;
            auto it = col.find(std::string_view(ev.domain));
            if (it != col.end()) fs.raw[i][it->second] += 1.0;
        }

    const auto train = corpus.indices_in(Split::Train);
    const double n = static_cast<double>(train.empty() ? 1 : train.size());
    fs.mean.assign(vocabulary.size(), 0.0);
    fs.stdev.assign(vocabulary.size(), 1.0);
    for (std::size_t c = 0; c < vocabulary.size(); ++c) {
        double s = 0.0;
        for (auto i : train) s += fs.raw[i][c];
        const double mu = s / n;
        double ss = 0.0;
        for (auto i : train) {
            const double d = fs.raw[i][c] - mu;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / n);
        fs.mean[c] = mu;
        fs.stdev[c] = sd > 1e-12 ? sd : 1.0;
    }
    return fs;
}

}  // namespace coordgraph

#endif

#ifndef COORDGRAPH_EVALUATE_HPP
#define COORDGRAPH_EVALUATE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coordgraph/censor.hpp"
#include "coordgraph/courl.hpp"
#include "coordgraph/encoding.hpp"
#include "coordgraph/events.hpp"
#include "coordgraph/forest.hpp"
#include "coordgraph/linear.hpp"
#include "coordgraph/metrics.hpp"
#include "coordgraph/nn.hpp"
#include "coordgraph/synth.hpp"

namespace coordgraph {

/// Builds the A_k / B_k descriptor family from the scenario's operation list
/// (each operation = {earlier campaign, later campaign}).
inline TaskDescriptor make_task(const std::string& name,
                                const std::vector<std::array<std::string, 2>>& operations,
                                std::uint64_t seed) {
    if (name.size() < 2 || (name[0] != 'A' && name[0] != 'B'))
        throw std::invalid_argument("make_task: task names are A<k> or B<k>");
    const std::size_t k = static_cast<std::size_t>(std::stoul(name.substr(1)));
    if (k < 1 || k > operations.size())
        throw std::invalid_argument("make_task: operation index out of range: " + name);
    TaskDescriptor td;
    td.name = name;
    td.seed = seed;
    td.val_campaign = operations[k - 1][0];
    td.test_campaign = operations[k - 1][1];
    if (name[0] == 'A') {
        td.train_campaigns = {operations[k - 1][0]};
    } else {
        for (std::size_t j = 0; j < operations.size(); ++j)
            if (j != k - 1) td.train_campaigns.push_back(operations[j][0]);
    }
    return td;
}

/// Everything derived from the corpus that does not depend on the task or
/// the censorship configuration: co-URL maps, the censored graph, and the
/// unsupervised graph encoding blocks. Built once, reused across runs.
struct EncodingCache {
    CoUrlMap directed;
    CoUrlMap symmetric;
    CensoredGraph graph;
    nn::EdgeSet edges;
    GraphEncoding encoding;
};

inline EncodingCache build_encoding_cache(const Corpus& corpus,
                                          const GraphBuildConfig& graph_config,
                                          const EncodingFlags& flags, std::uint64_t seed,
                                          const Node2VecConfig& n2v = {}) {
    EncodingCache cache;
    cache.directed = compute_courls(corpus);
    cache.symmetric = symmetrize(cache.directed);
    cache.graph = build_censored_graph(cache.symmetric, corpus.size(), graph_config);
    cache.edges = nn::build_edge_set(cache.graph, cache.symmetric);
    cache.encoding = compute_graph_encoding(cache.graph, flags,
                                            derive_seed(seed, "encoding"), n2v);
    return cache;
}

/// Percent-scale metrics for one (task, model) pair: mean and sample sigma
/// over the repeated seeded splits.
struct MetricResult {
    double f1_train = 0.0;  // in-sample
    double f1_val = 0.0, f1_test = 0.0, auc_test = 0.0;
    double sigma_f1_val = 0.0, sigma_f1_test = 0.0, sigma_auc_test = 0.0;
    std::size_t n_seeds = 0;
};

struct TaskRunArtifacts {
    nn::TrainedModel deep;          // populated for deep kinds
    InputLayout layout;
    std::vector<Split> split;
    nn::Matrix inputs;
    std::vector<int> labels;
};

/// Trains the configured model on one task for one seed and scores it.
/// Features and censorship are rebuilt from that seed's training split;
/// graph encodings come from the cache (they are unsupervised).
inline MetricResult run_task_once(Corpus& corpus, const EncodingCache& cache,
                                  const TaskDescriptor& descriptor,
                                  const nn::ModelConfig& model_config,
                                  const CensorConfig& censor_config,
                                  const EncodingFlags& flags,
                                  TaskRunArtifacts* artifacts = nullptr) {
    corpus.split = compute_split_assignment(corpus, descriptor);

    const DomainFrequencyTable table = domain_frequencies(corpus, Split::Train);
    const CensoredVocabulary vocab = censor_and_select(table, censor_config);
    const CensoredFeatureSet content = build_content_features(corpus, vocab.retained);

    InputLayout layout;
    const nn::Matrix X = assemble_encoding(corpus, content, cache.encoding, flags, &layout);
    std::vector<int> labels(corpus.size());
    for (std::uint32_t i = 0; i < corpus.size(); ++i) labels[i] = corpus.accounts[i].label;
    const auto train = corpus.indices_in(Split::Train);
    const auto val = corpus.indices_in(Split::Val);
    const auto test = corpus.indices_in(Split::Test);

    nn::Vector probs;
    nn::TrainedModel trained;
    switch (model_config.kind) {
        case nn::ModelKind::LR: {
            const auto m = nn::train_logreg(X, labels, train, val);
            probs = m.predict_probabilities(X);
            break;
        }
        case nn::ModelKind::RF: {
            const auto m = nn::train_random_forest(X, labels, train, val, {},
                                                   derive_seed(model_config.seed, "rf"));
            probs = m.predict_probabilities(X);
            break;
        }
        default: {
            const bool graph_model = nn::is_graph_model(model_config.kind);
            trained = nn::train_deep(model_config, X, graph_model ? &cache.graph : nullptr,
                                     graph_model ? &cache.edges : nullptr, labels, train, val);
            trained.layout = layout;
            probs = trained.model.predict_probabilities(
                X, graph_model ? &cache.graph : nullptr,
                graph_model ? &cache.edges : nullptr);
            break;
        }
    }

    auto subset_metrics = [&](const std::vector<std::uint32_t>& subset) {
        std::vector<double> p;
        std::vector<int> y;
        p.reserve(subset.size());
        for (auto i : subset) {
            p.push_back(probs(i));
            y.push_back(labels[i]);
        }
        return std::pair{p, y};
    };

    MetricResult r;
    {
        auto [p, y] = subset_metrics(train);
        r.f1_train = f1_percent(p, y);
    }
    {
        auto [p, y] = subset_metrics(val);
        r.f1_val = f1_percent(p, y);
    }
    {
        auto [p, y] = subset_metrics(test);
        r.f1_test = f1_percent(p, y);
        r.auc_test = auc_percent(p, y);
    }
    r.n_seeds = 1;

    if (artifacts) {
        artifacts->deep = std::move(trained);
        artifacts->layout = layout;
        artifacts->split = corpus.split;
        artifacts->inputs = X;
        artifacts->labels = labels;
    }
    return r;
}

/// Repeats run_task_once over the seed list and aggregates mean and sample
/// sigma. Deterministic: the same seed list reproduces the same result.
inline MetricResult run_task(const Corpus& corpus, const EncodingCache& cache,
                             const std::string& task_name,
                             const std::vector<std::array<std::string, 2>>& operations,
                             const nn::ModelConfig& model_config,
                             const CensorConfig& censor_config, const EncodingFlags& flags,
                             const std::vector<std::uint64_t>& seeds,
                             TaskRunArtifacts* artifacts = nullptr) {
    if (seeds.empty()) throw std::invalid_argument("run_task: empty seed list");
    Corpus working = corpus;
    std::vector<double> f1_train, f1_val, f1_test, auc_test;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        TaskDescriptor td = make_task(task_name, operations, seeds[s]);
        nn::ModelConfig mc = model_config;
        mc.seed = derive_seed(model_config.seed, seeds[s]);
        const MetricResult one =
            run_task_once(working, cache, td, mc, censor_config, flags,
                          s + 1 == seeds.size() ? artifacts : nullptr);
        f1_train.push_back(one.f1_train);
        f1_val.push_back(one.f1_val);
        f1_test.push_back(one.f1_test);
        auc_test.push_back(one.auc_test);
    }
    MetricResult r;
    r.f1_train = mean_of(f1_train);
    r.f1_val = mean_of(f1_val);
    r.f1_test = mean_of(f1_test);
    r.auc_test = mean_of(auc_test);
    r.sigma_f1_val = stdev_of(f1_val);
    r.sigma_f1_test = stdev_of(f1_test);
    r.sigma_auc_test = stdev_of(auc_test);
    r.n_seeds = seeds.size();
    return r;
}

/// One gamma_max x k_top sweep cell: harmonic-mean aggregate of the subtasks
/// with propagated sigma (Fig. 3 style), plus the per-subtask values.
struct SweepCell {
    double gamma_max = 0.0;
    std::size_t k_top = 0;
    std::map<std::string, AggregateResult> aggregate;  // metric -> value/sigma
    std::map<std::string, MetricResult> subtasks;
    std::string error;  // nonempty when the cell failed
};

struct SweepGrid {
    std::vector<SweepCell> cells;
};

inline SweepGrid sweep(const Corpus& corpus, const EncodingCache& cache,
                       const std::vector<std::string>& tasks,
                       const std::vector<std::array<std::string, 2>>& operations,
                       const std::vector<double>& gamma_list,
                       const std::vector<std::size_t>& k_list,
                       const nn::ModelConfig& model_config, const EncodingFlags& flags,
                       const std::vector<std::uint64_t>& seeds) {
    if (gamma_list.empty() || k_list.empty())
        throw std::invalid_argument("sweep: empty grid");
    SweepGrid grid;
    for (double gamma : gamma_list)
        for (std::size_t k : k_list) {
            SweepCell cell;
            cell.gamma_max = gamma;
            cell.k_top = k;
            try {
                std::vector<double> f1v, f1t, auc, sf1v, sf1t, sauc;
                for (const auto& task : tasks) {
                    const MetricResult r = run_task(corpus, cache, task, operations,
                                                    model_config, {gamma, k}, flags, seeds);
                    cell.subtasks[task] = r;
                    f1v.push_back(r.f1_val);
                    f1t.push_back(r.f1_test);
                    auc.push_back(r.auc_test);
                    sf1v.push_back(r.sigma_f1_val);
                    sf1t.push_back(r.sigma_f1_test);
                    sauc.push_back(r.sigma_auc_test);
                }
                cell.aggregate["f1_val"] = harmonic_aggregate(f1v, sf1v);
                cell.aggregate["f1_test"] = harmonic_aggregate(f1t, sf1t);
                cell.aggregate["auc_test"] = harmonic_aggregate(auc, sauc);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            grid.cells.push_back(std::move(cell));
        }
    return grid;
}

}  // namespace coordgraph

#endif

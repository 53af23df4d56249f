#ifndef COORDGRAPH_PIPELINE_HPP
#define COORDGRAPH_PIPELINE_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coordgraph/evaluate.hpp"
#include "coordgraph/ig.hpp"
#include "coordgraph/synth.hpp"

#include <json.hpp>

namespace coordgraph::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

struct PipelineConfig {
    fs::path out_dir = "out";
    fs::path events_path;  // defaults to <out_dir>/events.csv
    std::string scenario = "three-ops";
    std::uint64_t seed = 1;

    bool apply_filter = true;
    InclusionCriteria criteria;

    CensorConfig censor;          // gamma_max 0.54, k_top 2500
    GraphBuildConfig graph;       // n 10, T 15
    EncodingFlags flags;          // all four blocks
    Node2VecConfig node2vec;
    MatrixNormalization matrix_norm = MatrixNormalization::Product;

    nn::ModelConfig model;
    std::vector<std::string> models = {"LR", "RF", "MLP", "GCN", "MP-GCN(s)", "MP-GCN"};
    std::vector<std::string> tasks = {"A1", "A2", "A3", "B1", "B2", "B3"};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string train_task = "A1";

    std::vector<double> sweep_gamma = {0.0, 0.54, 1.0};
    std::vector<std::size_t> sweep_k = {500, 1000, 2500};

    std::size_t attribution_top_domains = 30;

    int threads = 0;
    bool force = false;

    json to_json() const {
        json j;
        j["out_dir"] = out_dir.string();
        j["events"] = events_path.string();
        j["scenario"] = scenario;
        j["seed"] = seed;
        j["apply_filter"] = apply_filter;
        j["criteria"] = {{"min_active_days", criteria.min_active_days},
                         {"min_tweets", criteria.min_tweets},
                         {"min_url_shares", criteria.min_url_shares},
                         {"min_unique_domains", criteria.min_unique_domains},
                         {"min_courls", criteria.min_courls},
                         {"min_neighbors", criteria.min_neighbors}};
        j["censor"] = {{"gamma_max", censor.gamma_max}, {"k_top", censor.k_top}};
        j["graph"] = {{"n", graph.n}, {"T", graph.T}, {"t_inclusive", graph.t_inclusive}};
        j["encoding_flags"] = flags.notation();
        j["node2vec"] = {{"dim", node2vec.dim},
                         {"p", node2vec.p},
                         {"q", node2vec.q},
                         {"walk_length", node2vec.walk_length},
                         {"walks_per_node", node2vec.walks_per_node},
                         {"window", node2vec.window},
                         {"negatives", node2vec.negatives},
                         {"epochs", node2vec.epochs}};
        j["matrix_normalization"] =
            matrix_norm == MatrixNormalization::Product ? "product" : "geometric_mean";
        j["model"] = model.to_json();
        j["models"] = models;
        j["tasks"] = tasks;
        j["seeds"] = seeds;
        j["train_task"] = train_task;
        j["sweep"] = {{"gamma_max", sweep_gamma}, {"k_top", sweep_k}};
        j["attribution_top_domains"] = attribution_top_domains;
        return j;
    }

    static PipelineConfig from_json(const json& j) {
        PipelineConfig c;
        if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("events")) c.events_path = j.at("events").get<std::string>();
        if (j.contains("scenario")) c.scenario = j.at("scenario").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("apply_filter")) c.apply_filter = j.at("apply_filter").get<bool>();
        if (j.contains("criteria")) {
            const auto& cr = j.at("criteria");
            c.criteria.min_active_days = cr.value("min_active_days", c.criteria.min_active_days);
            c.criteria.min_tweets = cr.value("min_tweets", c.criteria.min_tweets);
            c.criteria.min_url_shares = cr.value("min_url_shares", c.criteria.min_url_shares);
            c.criteria.min_unique_domains =
                cr.value("min_unique_domains", c.criteria.min_unique_domains);
            c.criteria.min_courls = cr.value("min_courls", c.criteria.min_courls);
            c.criteria.min_neighbors = cr.value("min_neighbors", c.criteria.min_neighbors);
        }
        if (j.contains("censor")) {
            const auto& ce = j.at("censor");
            if (ce.contains("gamma_max")) {
                if (ce.at("gamma_max").is_string())  // "inf" disables censorship
                    c.censor.gamma_max = std::numeric_limits<double>::infinity();
                else
                    c.censor.gamma_max = ce.at("gamma_max").get<double>();
            }
            c.censor.k_top = ce.value("k_top", c.censor.k_top);
        }
        if (j.contains("graph")) {
            const auto& g = j.at("graph");
            c.graph.n = g.value("n", c.graph.n);
            c.graph.T = g.value("T", c.graph.T);
            c.graph.t_inclusive = g.value("t_inclusive", c.graph.t_inclusive);
        }
        if (j.contains("encoding_flags"))
            c.flags = EncodingFlags::from_notation(j.at("encoding_flags").get<std::string>());
        if (j.contains("node2vec")) {
            const auto& n = j.at("node2vec");
            c.node2vec.dim = n.value("dim", c.node2vec.dim);
            c.node2vec.p = n.value("p", c.node2vec.p);
            c.node2vec.q = n.value("q", c.node2vec.q);
            c.node2vec.walk_length = n.value("walk_length", c.node2vec.walk_length);
            c.node2vec.walks_per_node = n.value("walks_per_node", c.node2vec.walks_per_node);
            c.node2vec.window = n.value("window", c.node2vec.window);
            c.node2vec.negatives = n.value("negatives", c.node2vec.negatives);
            c.node2vec.epochs = n.value("epochs", c.node2vec.epochs);
        }
        if (j.contains("matrix_normalization"))
            c.matrix_norm = j.at("matrix_normalization").get<std::string>() == "geometric_mean"
                                ? MatrixNormalization::GeometricMean
                                : MatrixNormalization::Product;
        if (j.contains("model")) c.model = nn::ModelConfig::from_json(j.at("model"));
        if (j.contains("models")) c.models = j.at("models").get<std::vector<std::string>>();
        if (j.contains("tasks")) c.tasks = j.at("tasks").get<std::vector<std::string>>();
        if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("train_task")) c.train_task = j.at("train_task").get<std::string>();
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            if (s.contains("gamma_max"))
                c.sweep_gamma = s.at("gamma_max").get<std::vector<double>>();
            if (s.contains("k_top"))
                c.sweep_k = s.at("k_top").get<std::vector<std::size_t>>();
        }
        if (j.contains("attribution_top_domains"))
            c.attribution_top_domains = j.at("attribution_top_domains").get<std::size_t>();
        return c;
    }

    static PipelineConfig load(const fs::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config: " + path.string());
        json j;
        in >> j;
        return from_json(j);
    }

    /// Hash of the config fields that shape the data artifacts. Model and
    /// report knobs are excluded: iterating on the model must not invalidate
    /// events/courl/encoding, or the chain would never be resumable.
    /// Execution details (out_dir, threads, force) are likewise excluded.
    std::string config_hash() const {
        json j = to_json();
        for (const char* key : {"out_dir", "events", "model", "models", "sweep",
                                "attribution_top_domains"})
            j.erase(key);
        // infinity serializes as null; make it explicit for hashing
        if (censor.gamma_max == std::numeric_limits<double>::infinity())
            j["censor"]["gamma_max"] = "inf";
        return hash_hex(fnv1a64(j.dump()));
    }

    fs::path events_file() const {
        return events_path.empty() ? out_dir / "events.csv" : events_path;
    }
};

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt_metric(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

/// Atomic write: temp file in the same directory, then rename.
inline void write_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing artifact: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Every artifact leads with its config hash ("# config_hash=..." for CSV,
/// a "config_hash" field for JSON). Downstream commands refuse mismatched
/// upstream artifacts unless forced.
inline std::string embedded_hash(const fs::path& path) {
    const std::string content = read_file(path);
    if (path.extension() == ".json") {
        const json j = json::parse(content);
        return j.value("config_hash", "");
    }
    const std::string prefix = "# config_hash=";
    if (content.rfind(prefix, 0) == 0) {
        const auto end = content.find('\n');
        return content.substr(prefix.size(), end - prefix.size());
    }
    return "";
}

inline void require_upstream(const PipelineConfig& config, const fs::path& path) {
    if (!fs::exists(path))
        throw std::runtime_error("missing input artifact: " + path.string() +
                                 " (run the upstream command first)");
    if (config.force) return;
    const std::string h = embedded_hash(path);
    if (!h.empty() && h != config.config_hash())
        throw std::runtime_error("config hash mismatch for " + path.string() +
                                 " (expected " + config.config_hash() + ", found " + h +
                                 "); rerun upstream or pass --force");
}

inline void write_manifest(const PipelineConfig& config, const std::string& command,
                           const std::vector<fs::path>& inputs,
                           const std::vector<fs::path>& outputs) {
    json j;
    j["command"] = command;
    j["config_hash"] = config.config_hash();
    j["seed"] = config.seed;
    json jin = json::object(), jout = json::object();
    for (const auto& p : inputs) jin[p.filename().string()] = hash_hex(fnv1a64(read_file(p)));
    for (const auto& p : outputs)
        jout[p.filename().string()] = hash_hex(fnv1a64(read_file(p)));
    j["inputs"] = jin;
    j["outputs"] = jout;
    write_atomic(config.out_dir / (command + ".manifest.json"), j.dump(2) + "\n");
}

// ---- shared loading ----

struct LoadedCorpus {
    Corpus corpus;           // filtered when apply_filter is set
    CoUrlMap directed;       // over the filtered corpus
    CoUrlMap symmetric;
    std::size_t excluded = 0;
};

inline LoadedCorpus load_corpus(const PipelineConfig& config) {
    std::ifstream in(config.events_file());
    if (!in)
        throw std::runtime_error("missing input artifact: " +
                                 config.events_file().string());
    Corpus corpus = parse_events(in);
    LoadedCorpus out;
    if (config.apply_filter) {
        CoUrlMap pre = compute_courls(corpus);
        const AccountCoUrlStats stats = per_account_courl_stats(pre, corpus.size());
        Corpus marked = filter_accounts(corpus, config.criteria, stats);
        Corpus kept;
        kept.rejected_rows = marked.rejected_rows;
        for (std::uint32_t i = 0; i < marked.size(); ++i) {
            if (marked.split[i] == Split::Excluded) {
                ++out.excluded;
                continue;
            }
            kept.accounts.push_back(std::move(marked.accounts[i]));
        }
        kept.rebuild_index();
        out.corpus = std::move(kept);
    } else {
        out.corpus = std::move(corpus);
    }
    out.directed = compute_courls(out.corpus);
    out.symmetric = symmetrize(out.directed);
    return out;
}

// ---- commands ----

inline int cmd_synth(const PipelineConfig& config) {
    const synth::Scenario sc = synth::scenario(config.scenario, config.seed);
    const synth::LabeledEvents labeled = synth::generate_scenario_events(sc);

    std::ostringstream events;
    csv::Writer w(events);
    w.comment("config_hash=" + config.config_hash());
    w.row({"account_id", "timestamp", "url", "label", "campaign"});
    for (std::size_t i = 0; i < labeled.events.size(); ++i)
        w.row({labeled.events[i].account_id, std::to_string(labeled.events[i].timestamp),
               labeled.events[i].url, labeled.labels[i] ? "1" : "0",
               labeled.campaigns[i]});

    json specs;
    specs["config_hash"] = config.config_hash();
    specs["scenario"] = config.scenario;
    specs["campaigns"] = json::array();
    for (const auto& c : sc.campaigns) specs["campaigns"].push_back(synth::to_json(c));
    specs["baseline"] = synth::to_json(sc.baseline);
    specs["amplifiers"] = synth::to_json(sc.amplifiers);
    specs["operations"] = json::array();
    for (const auto& op : sc.operations) specs["operations"].push_back({op[0], op[1]});

    write_atomic(config.events_file(), events.str());
    write_atomic(config.out_dir / "campaign_specs.json", specs.dump(2) + "\n");
    write_manifest(config, "synth", {},
                   {config.events_file(), config.out_dir / "campaign_specs.json"});
    std::cout << "synth: wrote " << config.events_file().string() << "\n";
    return 0;
}

inline std::vector<std::array<std::string, 2>> operations_of(const PipelineConfig& config) {
    const fs::path specs_path = config.out_dir / "campaign_specs.json";
    if (fs::exists(specs_path)) {
        const json j = json::parse(read_file(specs_path));
        std::vector<std::array<std::string, 2>> ops;
        for (const auto& op : j.at("operations"))
            ops.push_back({op[0].get<std::string>(), op[1].get<std::string>()});
        return ops;
    }
    // fall back to the bundled scenario layout
    const synth::Scenario sc = synth::scenario(config.scenario, config.seed);
    return sc.operations;
}

inline int cmd_courl(const PipelineConfig& config) {
    require_upstream(config, config.events_file());
    LoadedCorpus loaded = load_corpus(config);
    const Corpus& corpus = loaded.corpus;

    // sparse symmetrized export, one row per unordered pair per bin
    std::ostringstream courl;
    csv::Writer w(courl);
    w.comment("config_hash=" + config.config_hash());
    w.row({"account_i", "account_j", "tau", "count"});
    for (std::uint64_t key : loaded.symmetric.sorted_keys()) {
        const std::uint32_t i = static_cast<std::uint32_t>(key >> 32);
        const std::uint32_t j = static_cast<std::uint32_t>(key & 0xffffffffu);
        if (i >= j) continue;
        const CoUrlVector& vec = loaded.symmetric.pairs.at(key);
        for (int t = 0; t < kCoUrlBins; ++t)
            if (vec.bins[t] > 0)
                w.row({corpus.accounts[i].account_id, corpus.accounts[j].account_id,
                       std::to_string(t + 1), std::to_string(vec.bins[t])});
    }

    // campaign list in corpus order
    std::vector<std::string> campaigns;
    for (const auto& rec : corpus.accounts) campaigns.push_back(rec.campaign);
    std::sort(campaigns.begin(), campaigns.end());
    campaigns.erase(std::unique(campaigns.begin(), campaigns.end()), campaigns.end());

    std::ostringstream cdfs;
    csv::Writer wc(cdfs);
    wc.comment("config_hash=" + config.config_hash());
    wc.row({"campaign", "tau", "cdf"});
    for (const auto& campaign : campaigns) {
        const CoordinationCdf cdf = campaign_cdf(loaded.symmetric, corpus, campaign);
        if (cdf.degenerate) continue;
        for (int t = 0; t < kCoUrlBins; ++t)
            wc.row({campaign, std::to_string(t + 1), fmt_double(cdf.value[t])});
    }

    auto write_matrix = [&](bool near, const fs::path& path) {
        const CrossCampaignMatrix m = cross_campaign_matrix(
            loaded.directed, corpus, campaigns, near, config.matrix_norm);
        std::ostringstream text;
        csv::Writer wm(text);
        wm.comment("config_hash=" + config.config_hash());
        wm.row({"lead", "lag", "normalized_count", "empty"});
        for (std::size_t a = 0; a < campaigns.size(); ++a)
            for (std::size_t b = 0; b < campaigns.size(); ++b)
                wm.row({campaigns[a], campaigns[b], fmt_double(m.value[a][b]),
                        m.empty_flag[a][b] ? "1" : "0"});
        write_atomic(path, text.str());
    };

    write_atomic(config.out_dir / "courl.csv", courl.str());
    write_atomic(config.out_dir / "courl_cdf.csv", cdfs.str());
    write_matrix(false, config.out_dir / "courl_matrix.csv");
    write_matrix(true, config.out_dir / "courl_matrix_near.csv");
    write_manifest(config, "courl", {config.events_file()},
                   {config.out_dir / "courl.csv", config.out_dir / "courl_cdf.csv",
                    config.out_dir / "courl_matrix.csv",
                    config.out_dir / "courl_matrix_near.csv"});
    std::cout << "courl: " << loaded.symmetric.pairs.size() / 2 << " pairs, "
              << loaded.excluded << " accounts excluded by criteria\n";
    return 0;
}

/// Reads courl.csv back into a symmetrized map over the given corpus.
inline CoUrlMap read_courl_csv(const fs::path& path, const Corpus& corpus) {
    csv::Table table = csv::read_file(path);
    CoUrlMap map;
    map.symmetrized = true;
    for (const auto& row : table.rows) {
        if (row.size() != 4) throw std::runtime_error("courl.csv: bad row");
        const auto i = corpus.index_of(row[0]);
        const auto j = corpus.index_of(row[1]);
        if (!i || !j)
            throw std::runtime_error("courl.csv references unknown account " + row[0]);
        const int tau = std::stoi(row[2]);
        const auto count = static_cast<std::uint32_t>(std::stoul(row[3]));
        map.pairs[pair_key(*i, *j)].bins[tau - 1] = count;
        map.pairs[pair_key(*j, *i)].bins[tau - 1] = count;
    }
    return map;
}

inline int cmd_censor(const PipelineConfig& config) {
    require_upstream(config, config.events_file());
    LoadedCorpus loaded = load_corpus(config);
    Corpus& corpus = loaded.corpus;

    const auto ops = operations_of(config);
    const TaskDescriptor td =
        make_task(config.train_task, ops, config.seeds.empty() ? config.seed
                                                               : config.seeds.front());
    corpus.split = compute_split_assignment(corpus, td);

    const DomainFrequencyTable table = domain_frequencies(corpus, Split::Train);
    const CensoredVocabulary vocab = censor_and_select(table, config.censor);
    const CensoredFeatureSet features = build_content_features(corpus, vocab.retained);

    std::ostringstream voc;
    csv::Writer wv(voc);
    wv.comment("config_hash=" + config.config_hash());
    wv.row({"domain", "gamma", "total_count", "censored"});
    for (const auto& e : vocab.audit)
        wv.row({e.domain, fmt_double(e.gamma), std::to_string(e.total_count),
                e.censored ? "1" : "0"});

    std::ostringstream feat;
    csv::Writer wf(feat);
    wf.comment("config_hash=" + config.config_hash());
    {
        std::vector<std::string> header = {"account_id"};
        for (const auto& d : features.retained_domains) header.push_back(d);
        wf.row(header);
        for (std::uint32_t i = 0; i < corpus.size(); ++i) {
            std::vector<std::string> row = {corpus.accounts[i].account_id};
            for (std::size_t c = 0; c < features.retained_domains.size(); ++c)
                row.push_back(fmt_double(features.raw[i][c]));
            wf.row(row);
        }
    }

    json manifest = split_manifest(corpus, td);
    manifest["config_hash"] = config.config_hash();

    write_atomic(config.out_dir / "vocabulary.csv", voc.str());
    write_atomic(config.out_dir / "content_features.csv", feat.str());
    write_atomic(config.out_dir / "split_manifest.json", manifest.dump(2) + "\n");
    write_manifest(config, "censor", {config.events_file()},
                   {config.out_dir / "vocabulary.csv",
                    config.out_dir / "content_features.csv",
                    config.out_dir / "split_manifest.json"});
    std::cout << "censor: " << vocab.retained.size() << " of " << vocab.audit.size()
              << " domains retained\n";
    return 0;
}

inline int cmd_encode(const PipelineConfig& config) {
    require_upstream(config, config.events_file());
    require_upstream(config, config.out_dir / "courl.csv");
    LoadedCorpus loaded = load_corpus(config);
    const Corpus& corpus = loaded.corpus;
    const CoUrlMap sym = read_courl_csv(config.out_dir / "courl.csv", corpus);

    const CensoredGraph graph = build_censored_graph(sym, corpus.size(), config.graph);
    if (graph.disconnected)
        std::cout << "encode: warning: censored graph has no edges\n";
    const GraphEncoding enc = compute_graph_encoding(
        graph, config.flags, derive_seed(config.seed, "encoding"), config.node2vec);

    std::ostringstream edges;
    csv::Writer we(edges);
    we.comment("config_hash=" + config.config_hash());
    we.row({"account_i", "account_j"});
    for (std::uint32_t u = 0; u < graph.n_nodes; ++u) {
        auto [lo, hi] = graph.adj(u);
        for (auto it = lo; it != hi; ++it)
            if (u < *it)
                we.row({corpus.accounts[u].account_id, corpus.accounts[*it].account_id});
    }

    std::ostringstream encoding;
    csv::Writer wenc(encoding);
    wenc.comment("config_hash=" + config.config_hash());
    {
        std::vector<std::string> header = {"account_id"};
        if (config.flags.node2vec)
            for (int d = 0; d < kNode2VecDim; ++d)
                header.push_back("n2v_" + std::to_string(d));
        if (config.flags.le)
            for (int d = 0; d < kLeDim; ++d) header.push_back("le_" + std::to_string(d));
        if (config.flags.rwpe)
            for (int d = 0; d < kRwpeDim; ++d)
                header.push_back("rwpe_" + std::to_string(d));
        if (config.flags.nf)
            for (const char* name : kNfNames) header.push_back(std::string("nf_") + name);
        wenc.row(header);
        for (std::uint32_t i = 0; i < corpus.size(); ++i) {
            std::vector<std::string> row = {corpus.accounts[i].account_id};
            if (config.flags.node2vec)
                for (int d = 0; d < kNode2VecDim; ++d)
                    row.push_back(fmt_double(enc.node2vec(i, d)));
            if (config.flags.le)
                for (int d = 0; d < kLeDim; ++d) row.push_back(fmt_double(enc.le(i, d)));
            if (config.flags.rwpe)
                for (int d = 0; d < kRwpeDim; ++d)
                    row.push_back(fmt_double(enc.rwpe(i, d)));
            if (config.flags.nf)
                for (int d = 0; d < kNfDim; ++d) row.push_back(fmt_double(enc.nf(i, d)));
            wenc.row(row);
        }
    }

    write_atomic(config.out_dir / "graph_edges.csv", edges.str());
    write_atomic(config.out_dir / "encoding.csv", encoding.str());
    write_manifest(config, "encode",
                   {config.events_file(), config.out_dir / "courl.csv"},
                   {config.out_dir / "graph_edges.csv", config.out_dir / "encoding.csv"});
    std::cout << "encode: " << graph.n_edges() << " edges over " << graph.n_nodes
              << " nodes\n";
    return 0;
}

/// Reads encoding.csv back into GraphEncoding blocks aligned to the corpus.
inline GraphEncoding read_encoding_csv(const fs::path& path, const Corpus& corpus,
                                       const EncodingFlags& flags) {
    csv::Table table = csv::read_file(path);
    GraphEncoding enc;
    enc.computed = flags;
    const std::size_t n = corpus.size();
    if (flags.node2vec) enc.node2vec = Eigen::MatrixXd::Zero(n, kNode2VecDim);
    if (flags.le) enc.le = Eigen::MatrixXd::Zero(n, kLeDim);
    if (flags.rwpe) enc.rwpe = Eigen::MatrixXd::Zero(n, kRwpeDim);
    if (flags.nf) enc.nf = Eigen::MatrixXd::Zero(n, kNfDim);
    const std::size_t expected_cols = 1 + (flags.node2vec ? kNode2VecDim : 0) +
                                      (flags.le ? kLeDim : 0) + (flags.rwpe ? kRwpeDim : 0) +
                                      (flags.nf ? kNfDim : 0);
    if (table.header.size() != expected_cols)
        throw std::runtime_error("encoding.csv does not match the configured flags");
    for (const auto& row : table.rows) {
        const auto idx = corpus.index_of(row[0]);
        if (!idx) throw std::runtime_error("encoding.csv references unknown account");
        std::size_t c = 1;
        if (flags.node2vec)
            for (int d = 0; d < kNode2VecDim; ++d) enc.node2vec(*idx, d) = std::stod(row[c++]);
        if (flags.le)
            for (int d = 0; d < kLeDim; ++d) enc.le(*idx, d) = std::stod(row[c++]);
        if (flags.rwpe)
            for (int d = 0; d < kRwpeDim; ++d) enc.rwpe(*idx, d) = std::stod(row[c++]);
        if (flags.nf)
            for (int d = 0; d < kNfDim; ++d) enc.nf(*idx, d) = std::stod(row[c++]);
    }
    return enc;
}

inline EncodingCache load_encoding_cache(const PipelineConfig& config,
                                         LoadedCorpus& loaded) {
    EncodingCache cache;
    cache.directed = std::move(loaded.directed);
    cache.symmetric = read_courl_csv(config.out_dir / "courl.csv", loaded.corpus);
    cache.graph = build_censored_graph(cache.symmetric, loaded.corpus.size(), config.graph);
    cache.edges = nn::build_edge_set(cache.graph, cache.symmetric);
    cache.encoding =
        read_encoding_csv(config.out_dir / "encoding.csv", loaded.corpus, config.flags);
    return cache;
}

inline int cmd_train(const PipelineConfig& config) {
    require_upstream(config, config.events_file());
    require_upstream(config, config.out_dir / "courl.csv");
    require_upstream(config, config.out_dir / "encoding.csv");
    LoadedCorpus loaded = load_corpus(config);
    EncodingCache cache = load_encoding_cache(config, loaded);
    Corpus& corpus = loaded.corpus;

    const auto ops = operations_of(config);
    const std::uint64_t split_seed =
        config.seeds.empty() ? config.seed : config.seeds.front();
    const TaskDescriptor td = make_task(config.train_task, ops, split_seed);

    nn::ModelConfig mc = config.model;
    mc.seed = derive_seed(config.model.seed == 0 ? config.seed : config.model.seed,
                          split_seed);
    TaskRunArtifacts artifacts;
    const MetricResult r =
        run_task_once(corpus, cache, td, mc, config.censor, config.flags, &artifacts);

    json checkpoint;
    checkpoint["config_hash"] = config.config_hash();
    checkpoint["kind"] = nn::model_kind_name(mc.kind);
    checkpoint["task"] = config.train_task;
    checkpoint["seed"] = mc.seed;
    checkpoint["model_config"] = mc.to_json();
    checkpoint["layout"] = artifacts.layout.to_json();
    if (nn::is_deep_model(mc.kind)) checkpoint["params"] = artifacts.deep.model.params_to_json();
    checkpoint["metrics"] = {{"f1_train", r.f1_train},
                             {"f1_val", r.f1_val},
                             {"f1_test", r.f1_test},
                             {"auc_test", r.auc_test}};

    std::ostringstream log;
    csv::Writer wl(log);
    wl.comment("config_hash=" + config.config_hash());
    wl.row({"epoch", "loss", "val_f1"});
    for (std::size_t e = 0; e < artifacts.deep.log.size(); ++e)
        wl.row({std::to_string(e), fmt_double(artifacts.deep.log[e].loss),
                fmt_double(artifacts.deep.log[e].val_f1)});

    write_atomic(config.out_dir / "model.json", checkpoint.dump() + "\n");
    write_atomic(config.out_dir / "train_log.csv", log.str());
    write_manifest(config, "train",
                   {config.events_file(), config.out_dir / "courl.csv",
                    config.out_dir / "encoding.csv"},
                   {config.out_dir / "model.json", config.out_dir / "train_log.csv"});
    std::cout << "train: " << nn::model_kind_name(mc.kind) << " on " << config.train_task
              << "  f1(val) " << fmt_metric(r.f1_val) << "  f1(test) "
              << fmt_metric(r.f1_test) << "  auc(test) " << fmt_metric(r.auc_test) << "\n";
    return 0;
}

inline int cmd_evaluate(const PipelineConfig& config) {
    require_upstream(config, config.events_file());
    require_upstream(config, config.out_dir / "courl.csv");
    require_upstream(config, config.out_dir / "encoding.csv");
    LoadedCorpus loaded = load_corpus(config);
    EncodingCache cache = load_encoding_cache(config, loaded);
    const auto ops = operations_of(config);

    std::ostringstream results;
    csv::Writer wr(results);
    wr.comment("config_hash=" + config.config_hash());
    wr.row({"task", "model", "gamma_max", "k_top", "metric", "value", "sigma"});

    json summary;
    summary["config_hash"] = config.config_hash();
    summary["gamma_max"] = config.censor.gamma_max == std::numeric_limits<double>::infinity()
                               ? json("inf")
                               : json(config.censor.gamma_max);
    summary["k_top"] = config.censor.k_top;

    const std::string gamma_str =
        config.censor.gamma_max == std::numeric_limits<double>::infinity()
            ? "inf"
            : fmt_double(config.censor.gamma_max);

    for (const auto& model_name : config.models) {
        nn::ModelConfig mc = config.model;
        mc.kind = nn::model_kind_from_name(model_name);
        std::map<char, std::map<std::string, std::vector<double>>> family_values;
        std::map<char, std::map<std::string, std::vector<double>>> family_sigmas;
        for (const auto& task : config.tasks) {
            const MetricResult r = run_task(loaded.corpus, cache, task, ops, mc,
                                            config.censor, config.flags, config.seeds);
            const std::vector<std::pair<std::string, std::pair<double, double>>> rows = {
                {"f1_train", {r.f1_train, 0.0}},
                {"f1_val", {r.f1_val, r.sigma_f1_val}},
                {"f1_test", {r.f1_test, r.sigma_f1_test}},
                {"auc_test", {r.auc_test, r.sigma_auc_test}}};
            for (const auto& [metric, vs] : rows) {
                wr.row({task, model_name, gamma_str, std::to_string(config.censor.k_top),
                        metric, fmt_metric(vs.first), fmt_metric(vs.second)});
                summary["subtasks"][task][model_name][metric] = vs.first;
                summary["subtasks"][task][model_name][metric + "_sigma"] = vs.second;
                if (metric != "f1_train") {
                    family_values[task[0]][metric].push_back(vs.first);
                    family_sigmas[task[0]][metric].push_back(vs.second);
                }
            }
        }
        for (const auto& [family, metrics] : family_values) {
            const std::string fam(1, family);
            for (const auto& [metric, values] : metrics) {
                try {
                    const AggregateResult agg =
                        harmonic_aggregate(values, family_sigmas[family][metric]);
                    wr.row({fam, model_name, gamma_str, std::to_string(config.censor.k_top),
                            metric, fmt_metric(agg.value), fmt_metric(agg.sigma)});
                    summary["combined"][fam][model_name][metric] = agg.value;
                    summary["combined"][fam][model_name][metric + "_sigma"] = agg.sigma;
                } catch (const std::exception& e) {
                    summary["combined"][fam][model_name][metric] = nullptr;
                }
            }
        }
    }

    write_atomic(config.out_dir / "results.csv", results.str());
    write_atomic(config.out_dir / "summary.json", summary.dump(2) + "\n");
    write_manifest(config, "evaluate",
                   {config.events_file(), config.out_dir / "courl.csv",
                    config.out_dir / "encoding.csv"},
                   {config.out_dir / "results.csv", config.out_dir / "summary.json"});
    std::cout << "evaluate: " << config.models.size() << " models x "
              << config.tasks.size() << " tasks -> results.csv\n";
    return 0;
}

inline int cmd_attribute(const PipelineConfig& config) {
    require_upstream(config, config.events_file());
    require_upstream(config, config.out_dir / "courl.csv");
    require_upstream(config, config.out_dir / "encoding.csv");
    require_upstream(config, config.out_dir / "model.json");
    LoadedCorpus loaded = load_corpus(config);
    EncodingCache cache = load_encoding_cache(config, loaded);
    Corpus& corpus = loaded.corpus;

    const json checkpoint = json::parse(read_file(config.out_dir / "model.json"));
    const nn::ModelKind kind =
        nn::model_kind_from_name(checkpoint.at("kind").get<std::string>());
    if (!nn::is_deep_model(kind))
        throw std::runtime_error("attribute: unsupported model kind " +
                                 checkpoint.at("kind").get<std::string>() +
                                 " (integrated gradients needs a differentiable model)");

    nn::DeepModel model;
    model.config = nn::ModelConfig::from_json(checkpoint.at("model_config"));
    model.params_from_json(checkpoint.at("params"));
    const InputLayout layout = InputLayout::from_json(checkpoint.at("layout"));

    // rebuild the inputs exactly as the checkpointed task saw them
    const auto ops = operations_of(config);
    const std::string task = checkpoint.at("task").get<std::string>();
    const std::uint64_t split_seed =
        config.seeds.empty() ? config.seed : config.seeds.front();
    corpus.split = compute_split_assignment(corpus, make_task(task, ops, split_seed));
    const CensoredFeatureSet content = build_content_features(corpus, layout.vocabulary);
    const nn::Matrix X =
        assemble_encoding(corpus, content, cache.encoding, layout.flags);

    const bool graph_model = nn::is_graph_model(kind);
    const CensoredGraph* g = graph_model ? &cache.graph : nullptr;
    const nn::EdgeSet* es = graph_model ? &cache.edges : nullptr;

    std::vector<std::uint32_t> all_accounts;
    for (std::uint32_t i = 0; i < corpus.size(); ++i)
        if (corpus.split[i] != Split::Excluded) all_accounts.push_back(i);
    const ig::BaselineResult base = ig::empirical_baseline(model, X, g, es, all_accounts);

    // Table-3 style subsets: val and test IO accounts, plus baseline accounts
    std::map<std::string, std::vector<std::uint32_t>> subsets;
    for (std::uint32_t i : corpus.indices_in(Split::Val))
        (corpus.accounts[i].label ? subsets["val"] : subsets["baseline"]).push_back(i);
    for (std::uint32_t i : corpus.indices_in(Split::Test))
        (corpus.accounts[i].label ? subsets["test"] : subsets["baseline"]).push_back(i);

    const ig::FeatureGrouping grouping = ig::FeatureGrouping::from_layout(layout);
    json report;
    report["config_hash"] = config.config_hash();
    report["model"] = checkpoint.at("kind");
    report["task"] = task;
    report["baseline"] = {{"prediction", base.prediction},
                          {"band", {base.band_lo, base.band_hi}},
                          {"band_size", base.band_size}};

    std::ostringstream groups_csv;
    csv::Writer wg(groups_csv);
    wg.comment("config_hash=" + config.config_hash());
    wg.row({"subset", "group", "mean_abs_ig"});

    std::ostringstream domains_csv;
    csv::Writer wd(domains_csv);
    wd.comment("config_hash=" + config.config_hash());
    wd.row({"subset", "domain", "mean_signed_ig"});

    for (const auto& [subset_name, accounts] : subsets) {
        std::vector<ig::Vector> igs(accounts.size());
        std::vector<double> residuals(accounts.size());
        parallel_chunks(accounts.size(), 8, [&](std::size_t, std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                const ig::IGResult res =
                    ig::integrated_gradients(model, X, g, es, accounts[k], base.x);
                igs[k] = res.attribution;
                residuals[k] = res.completeness_residual;
            }
        });
        const auto grouped = ig::grouped_attribution(igs, grouping);
        for (const auto& [group, value] : grouped) {
            report["groups"][subset_name][group] = value;
            wg.row({subset_name, group, fmt_double(value)});
        }
        const auto domains =
            ig::domain_level_attribution(igs, layout, config.attribution_top_domains);
        for (const auto& d : domains) {
            report["domains"][subset_name].push_back({{"domain", d.domain}, {"ig", d.ig}});
            wd.row({subset_name, d.domain, fmt_double(d.ig)});
        }
        double worst = 0.0, total = 0.0;
        for (double r : residuals) {
            worst = std::max(worst, r);
            total += r;
        }
        report["completeness_residuals"][subset_name] = {
            {"max", worst},
            {"mean", residuals.empty() ? 0.0 : total / residuals.size()}};
    }

    write_atomic(config.out_dir / "attribution.json", report.dump(2) + "\n");
    write_atomic(config.out_dir / "attribution_groups.csv", groups_csv.str());
    write_atomic(config.out_dir / "attribution_domains.csv", domains_csv.str());
    write_manifest(config, "attribute",
                   {config.events_file(), config.out_dir / "courl.csv",
                    config.out_dir / "encoding.csv", config.out_dir / "model.json"},
                   {config.out_dir / "attribution.json",
                    config.out_dir / "attribution_groups.csv",
                    config.out_dir / "attribution_domains.csv"});
    std::cout << "attribute: F(x') = " << fmt_metric(base.prediction) << " over "
              << base.band_size << " neutral accounts\n";
    return 0;
}

inline int cmd_sweep(const PipelineConfig& config) {
    require_upstream(config, config.events_file());
    require_upstream(config, config.out_dir / "courl.csv");
    require_upstream(config, config.out_dir / "encoding.csv");
    LoadedCorpus loaded = load_corpus(config);
    EncodingCache cache = load_encoding_cache(config, loaded);
    const auto ops = operations_of(config);

    const SweepGrid grid = sweep(loaded.corpus, cache, config.tasks, ops,
                                 config.sweep_gamma, config.sweep_k, config.model,
                                 config.flags, config.seeds);

    std::ostringstream text;
    csv::Writer w(text);
    w.comment("config_hash=" + config.config_hash());
    w.row({"gamma_max", "k_top", "scope", "task", "metric", "value", "sigma", "error"});
    for (const auto& cell : grid.cells) {
        const std::string gamma =
            cell.gamma_max == std::numeric_limits<double>::infinity()
                ? "inf"
                : fmt_double(cell.gamma_max);
        if (!cell.error.empty()) {
            w.row({gamma, std::to_string(cell.k_top), "cell", "", "", "", "", cell.error});
            continue;
        }
        for (const auto& [metric, agg] : cell.aggregate)
            w.row({gamma, std::to_string(cell.k_top), "aggregate", "", metric,
                   fmt_metric(agg.value), fmt_metric(agg.sigma), ""});
        for (const auto& [task, r] : cell.subtasks) {
            w.row({gamma, std::to_string(cell.k_top), "subtask", task, "f1_val",
                   fmt_metric(r.f1_val), fmt_metric(r.sigma_f1_val), ""});
            w.row({gamma, std::to_string(cell.k_top), "subtask", task, "f1_test",
                   fmt_metric(r.f1_test), fmt_metric(r.sigma_f1_test), ""});
            w.row({gamma, std::to_string(cell.k_top), "subtask", task, "auc_test",
                   fmt_metric(r.auc_test), fmt_metric(r.sigma_auc_test), ""});
        }
    }

    write_atomic(config.out_dir / "sweep.csv", text.str());
    write_manifest(config, "sweep",
                   {config.events_file(), config.out_dir / "courl.csv",
                    config.out_dir / "encoding.csv"},
                   {config.out_dir / "sweep.csv"});
    std::cout << "sweep: " << grid.cells.size() << " cells -> sweep.csv\n";
    return 0;
}

}  // namespace coordgraph::pipeline

#endif

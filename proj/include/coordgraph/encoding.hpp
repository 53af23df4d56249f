#ifndef COORDGRAPH_ENCODING_HPP
#define COORDGRAPH_ENCODING_HPP

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "coordgraph/censor.hpp"
#include "coordgraph/graph.hpp"
#include "coordgraph/node2vec.hpp"
#include "coordgraph/spectral.hpp"

#include <json.hpp>

namespace coordgraph {

/// Presence of the four graph-encoding blocks, in the fixed order
/// node2vec, Laplacian Eigenmaps, RWPE, network features.
struct EncodingFlags {
    bool node2vec = true;
    bool le = true;
    bool rwpe = true;
    bool nf = true;

    /// Table-2 style notation: dagger = present, asterisk = absent.
    std::string notation() const {
        std::string s;
        for (bool b : {node2vec, le, rwpe, nf}) s += b ? '+' : '-';
        return s;
    }

    static EncodingFlags from_notation(const std::string& s) {
        if (s.size() != 4) throw std::invalid_argument("encoding flags: need 4 marks");
        auto bit = [&](std::size_t i) {
            if (s[i] == '+' || s[i] == 'd' || s[i] == '1') return true;
            if (s[i] == '-' || s[i] == '*' || s[i] == '0') return false;
            throw std::invalid_argument("encoding flags: bad mark in " + s);
        };
        return {bit(0), bit(1), bit(2), bit(3)};
    }
};

constexpr int kNode2VecDim = 128;
constexpr int kLeDim = 50;
constexpr int kRwpeDim = 50;
constexpr int kNfDim = 5;
inline const std::array<const char*, kNfDim> kNfNames = {
    "degree", "clustering", "betweenness", "pagerank", "hits"};

/// Per-node feature blocks computed from the censored graph. Rows align with
/// the corpus account index.
struct GraphEncoding {
    Eigen::MatrixXd node2vec;  // n x 128
    Eigen::MatrixXd le;        // n x 50
    Eigen::MatrixXd rwpe;      // n x 50
    Eigen::MatrixXd nf;        // n x 5 (raw; standardized at assembly)
    EncodingFlags computed;    // which blocks above are filled
};

inline GraphEncoding compute_graph_encoding(const CensoredGraph& g,
                                            const EncodingFlags& flags,
                                            std::uint64_t seed,
                                            const Node2VecConfig& n2v_cfg = {}) {
    GraphEncoding enc;
    enc.computed = flags;
    if (flags.le || flags.rwpe) {
        const SpectralBasis basis = spectral_basis(g);
        if (flags.le) enc.le = laplacian_eigenmaps(g, kLeDim, &basis);
        if (flags.rwpe) enc.rwpe = rwpe(g, kRwpeDim, &basis);
    }
    if (flags.node2vec) {
        Node2VecConfig cfg = n2v_cfg;
        cfg.dim = kNode2VecDim;
        enc.node2vec = node2vec_embed(g, cfg, seed);
    }
    if (flags.nf) {
        const NetworkFeatures f = network_features(g);
        enc.nf.resize(static_cast<Eigen::Index>(g.n_nodes), kNfDim);
        for (std::uint32_t v = 0; v < g.n_nodes; ++v) {
            enc.nf(v, 0) = f.degree[v];
            enc.nf(v, 1) = f.clustering[v];
            enc.nf(v, 2) = f.betweenness[v];
            enc.nf(v, 3) = f.pagerank[v];
            enc.nf(v, 4) = f.hits[v];
        }
    }
    return enc;
}

/// Column layout of an assembled model input: content block first, then the
/// selected graph blocks in fixed order. Carried with every trained model so
/// checkpoints are self-describing.
struct InputLayout {
    std::vector<std::string> vocabulary;  // content columns
    EncodingFlags flags;

    std::size_t content_dim() const { return vocabulary.size(); }
    std::size_t n2v_offset() const { return vocabulary.size(); }
    std::size_t le_offset() const { return n2v_offset() + (flags.node2vec ? kNode2VecDim : 0); }
    std::size_t rwpe_offset() const { return le_offset() + (flags.le ? kLeDim : 0); }
    std::size_t nf_offset() const { return rwpe_offset() + (flags.rwpe ? kRwpeDim : 0); }
    std::size_t total_dim() const { return nf_offset() + (flags.nf ? kNfDim : 0); }

    nlohmann::json to_json() const {
        return {{"vocabulary", vocabulary}, {"flags", flags.notation()}};
    }
    static InputLayout from_json(const nlohmann::json& j) {
        InputLayout l;
        l.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
        l.flags = EncodingFlags::from_notation(j.at("flags").get<std::string>());
        return l;
    }
};

/// Concatenates content features with the flagged graph blocks. The network
/// feature block is z-scored on the training rows; embeddings are used as-is.
/// A flag requesting a block that was never computed is fatal.
inline Eigen::MatrixXd assemble_encoding(const Corpus& corpus,
                                         const CensoredFeatureSet& content,
                                         const GraphEncoding& enc,
                                         const EncodingFlags& flags,
                                         InputLayout* layout_out = nullptr) {
    const std::size_t n = corpus.size();
    InputLayout layout;
    layout.vocabulary = content.retained_domains;
    layout.flags = flags;
    auto require = [&](bool requested, bool computed, const char* name) {
        if (requested && !computed)
            throw std::runtime_error(std::string("assemble_encoding: block '") + name +
                                     "' requested but not computed");
    };
    require(flags.node2vec, enc.computed.node2vec, "node2vec");
    require(flags.le, enc.computed.le, "le");
    require(flags.rwpe, enc.computed.rwpe, "rwpe");
    require(flags.nf, enc.computed.nf, "nf");

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(layout.total_dim()));
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < content.retained_domains.size(); ++c)
            X(i, static_cast<Eigen::Index>(c)) = content.standardized(i, c);

    if (flags.node2vec)
        X.middleCols(static_cast<Eigen::Index>(layout.n2v_offset()), kNode2VecDim) = enc.node2vec;
    if (flags.le)
        X.middleCols(static_cast<Eigen::Index>(layout.le_offset()), kLeDim) = enc.le;
    if (flags.rwpe)
        X.middleCols(static_cast<Eigen::Index>(layout.rwpe_offset()), kRwpeDim) = enc.rwpe;
    if (flags.nf) {
        Eigen::MatrixXd nf = enc.nf;
        const auto train = corpus.indices_in(Split::Train);
        const double cnt = static_cast<double>(train.empty() ? 1 : train.size());
        for (int c = 0; c < kNfDim; ++c) {
            double mu = 0.0;
            for (auto i : train) mu += nf(i, c);
            mu /= cnt;
            double ss = 0.0;
            for (auto i : train) ss += (nf(i, c) - mu) * (nf(i, c) - mu);
            const double sd = std::sqrt(ss / cnt);
            const double denom = sd > 1e-12 ? sd : 1.0;
            for (std::uint32_t i = 0; i < n; ++i) nf(i, c) = (nf(i, c) - mu) / denom;
        }
        X.middleCols(static_cast<Eigen::Index>(layout.nf_offset()), kNfDim) = nf;
    }
    if (layout_out) *layout_out = layout;
    return X;
}

}  // namespace coordgraph

#endif

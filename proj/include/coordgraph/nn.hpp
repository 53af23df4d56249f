#ifndef COORDGRAPH_NN_HPP
#define COORDGRAPH_NN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coordgraph/common.hpp"
#include "coordgraph/courl.hpp"
#include "coordgraph/encoding.hpp"
#include "coordgraph/graph.hpp"

#include <json.hpp>

namespace coordgraph::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ModelKind { LR, RF, MLP, GCN, MP_GCN_S, MP_GCN };

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::LR: return "LR";
        case ModelKind::RF: return "RF";
        case ModelKind::MLP: return "MLP";
        case ModelKind::GCN: return "GCN";
        case ModelKind::MP_GCN_S: return "MP-GCN(s)";
        case ModelKind::MP_GCN: return "MP-GCN";
    }
    return "?";
}

inline ModelKind model_kind_from_name(const std::string& s) {
    if (s == "LR") return ModelKind::LR;
    if (s == "RF") return ModelKind::RF;
    if (s == "MLP") return ModelKind::MLP;
    if (s == "GCN") return ModelKind::GCN;
    if (s == "MP-GCN(s)" || s == "MP_GCN_S") return ModelKind::MP_GCN_S;
    if (s == "MP-GCN" || s == "MP_GCN") return ModelKind::MP_GCN;
    throw std::invalid_argument("unknown model kind: " + s);
}

inline bool is_graph_model(ModelKind k) {
    return k == ModelKind::GCN || k == ModelKind::MP_GCN_S || k == ModelKind::MP_GCN;
}
inline bool is_deep_model(ModelKind k) {
    return k == ModelKind::MLP || is_graph_model(k);
}

struct ModelConfig {
    ModelKind kind = ModelKind::MLP;
    std::vector<int> hidden = {64, 64};
    double dropout_hidden = 0.5;
    double dropout_message = 0.2;
    double learning_rate = 1e-4;
    int max_epochs = 2000;
    int patience = 50;
    std::uint64_t seed = 0;
    int message_layers = 2;  // hidden layers L of the deep message MLP
    int message_width = 32;

    nlohmann::json to_json() const {
        return {{"kind", model_kind_name(kind)},   {"hidden", hidden},
                {"dropout_hidden", dropout_hidden}, {"dropout_message", dropout_message},
                {"learning_rate", learning_rate},   {"max_epochs", max_epochs},
                {"patience", patience},             {"seed", seed},
                {"message_layers", message_layers}, {"message_width", message_width}};
    }
    static ModelConfig from_json(const nlohmann::json& j) {
        ModelConfig c;
        c.kind = model_kind_from_name(j.at("kind").get<std::string>());
        c.hidden = j.at("hidden").get<std::vector<int>>();
        c.dropout_hidden = j.at("dropout_hidden").get<double>();
        c.dropout_message = j.at("dropout_message").get<double>();
        c.learning_rate = j.at("learning_rate").get<double>();
        c.max_epochs = j.at("max_epochs").get<int>();
        c.patience = j.at("patience").get<int>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.message_layers = j.at("message_layers").get<int>();
        c.message_width = j.at("message_width").get<int>();
        return c;
    }
};

inline double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

/// log(1 + e^z), overflow-safe.
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

/// Undirected edges with their co-URL vectors; slot_edge maps every CSR
/// adjacency slot to its undirected edge id so per-edge messages can be
/// looked up during aggregation.
struct EdgeSet {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // u < v
    Matrix features;                                             // n_edges x 100
    std::vector<std::size_t> slot_edge;

    std::size_t size() const { return edges.size(); }
};

inline EdgeSet build_edge_set(const CensoredGraph& g, const CoUrlMap& map) {
    if (!map.symmetrized)
        throw std::invalid_argument("build_edge_set: map must be symmetrized");
    EdgeSet es;
    for (std::uint32_t u = 0; u < g.n_nodes; ++u) {
        auto [lo, hi] = g.adj(u);
        for (auto it = lo; it != hi; ++it)
            if (u < *it) es.edges.emplace_back(u, *it);
    }
    es.features = Matrix::Zero(static_cast<Eigen::Index>(es.edges.size()), kCoUrlBins);
    std::unordered_map<std::uint64_t, std::size_t> edge_id;
    edge_id.reserve(es.edges.size());
    for (std::size_t e = 0; e < es.edges.size(); ++e) {
        auto [u, v] = es.edges[e];
        edge_id[pair_key(u, v)] = e;
        const CoUrlVector* vec = map.find(u, v);
        if (!vec)
            throw std::runtime_error("build_edge_set: edge without co-URL vector");
        for (int t = 0; t < kCoUrlBins; ++t)
            es.features(static_cast<Eigen::Index>(e), t) = static_cast<double>(vec->bins[t]);
    }
    es.slot_edge.resize(g.neighbors.size());
    for (std::uint32_t u = 0; u < g.n_nodes; ++u) {
        auto [lo, hi] = g.adj(u);
        for (auto it = lo; it != hi; ++it) {
            const auto key = u < *it ? pair_key(u, *it) : pair_key(*it, u);
            es.slot_edge[static_cast<std::size_t>(it - g.neighbors.data())] = edge_id.at(key);
        }
    }
    return es;
}

/// Plain GCN feature aggregation: P_i = sum_{j in N(i)} Z_j / sqrt(d_i d_j).
/// Isolated nodes aggregate over the empty set and stay zero.
inline Matrix gcn_aggregate(const CensoredGraph& g, const Matrix& Z) {
    if (static_cast<std::size_t>(Z.rows()) != g.n_nodes)
        throw std::invalid_argument("gcn_aggregate: row count mismatch");
    Matrix P = Matrix::Zero(Z.rows(), Z.cols());
    std::vector<double> inv_sqrt(g.n_nodes, 0.0);
    for (std::uint32_t v = 0; v < g.n_nodes; ++v)
        if (g.degree(v) > 0) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
    for (std::uint32_t i = 0; i < g.n_nodes; ++i) {
        auto [lo, hi] = g.adj(i);
        for (auto it = lo; it != hi; ++it)
            P.row(i) += (inv_sqrt[i] * inv_sqrt[*it]) * Z.row(*it);
    }
    return P;
}

/// Message-passing aggregation: P_i = sum_{j in N(i)} m_ij Z_j / sqrt(d_i d_j).
/// With all messages equal to 1 this reproduces gcn_aggregate bit for bit
/// (same traversal order, and the multiply by 1.0 is exact).
inline Matrix mp_aggregate(const CensoredGraph& g, const Matrix& Z, const EdgeSet& es,
                           const Vector& messages) {
    if (static_cast<std::size_t>(Z.rows()) != g.n_nodes)
        throw std::invalid_argument("mp_aggregate: row count mismatch");
    if (static_cast<std::size_t>(messages.size()) != es.size())
        throw std::invalid_argument("mp_aggregate: missing edge messages");
    Matrix P = Matrix::Zero(Z.rows(), Z.cols());
    std::vector<double> inv_sqrt(g.n_nodes, 0.0);
    for (std::uint32_t v = 0; v < g.n_nodes; ++v)
        if (g.degree(v) > 0) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
    for (std::uint32_t i = 0; i < g.n_nodes; ++i) {
        auto [lo, hi] = g.adj(i);
        for (auto it = lo; it != hi; ++it) {
            const std::size_t slot = static_cast<std::size_t>(it - g.neighbors.data());
            P.row(i) += (messages(static_cast<Eigen::Index>(es.slot_edge[slot])) *
                         (inv_sqrt[i] * inv_sqrt[*it])) *
                        Z.row(*it);
        }
    }
    return P;
}

struct DenseLayer {
    Matrix W;  // out x in
    Vector b;  // out
};

/// phi(e_ij): shallow m = sigma(w . e) or a deep L-layer perceptron
/// (ReLU hidden, sigmoid output so messages stay bounded).
struct MessageNet {
    bool shallow = true;
    Vector w;                      // shallow rule
    std::vector<DenseLayer> mlp;   // deep rule: hidden layers then 1-unit output
};

inline double message_shallow(const Vector& e, const Vector& w) {
    if (e.size() != w.size())
        throw std::invalid_argument("message_shallow: length mismatch");
    return sigmoid(w.dot(e));
}

inline double message_deep(const Vector& e, const std::vector<DenseLayer>& mlp) {
    Vector a = e;
    for (std::size_t l = 0; l + 1 < mlp.size(); ++l)
        a = (mlp[l].W * a + mlp[l].b).cwiseMax(0.0);
    const auto& out = mlp.back();
    return sigmoid((out.W * a + out.b)(0));
}

/// One layer's cached forward state, kept for backprop.
struct LayerCache {
    Matrix Z;  // post affine
    Matrix P;  // post aggregation
    Matrix H;  // post nonlinearity (+ dropout)
    Matrix drop_mask;           // empty when not training
    Vector msg;                 // per-edge messages (graph models)
    Vector msg_drop;            // per-edge dropout mask
    std::vector<Matrix> msg_hidden;  // deep message activations per mlp layer
};

struct ForwardCache {
    Matrix X;
    std::vector<LayerCache> layers;
    Vector logits;
};

struct Gradients {
    std::vector<DenseLayer> node_layers;
    DenseLayer readout;
    std::vector<MessageNet> messages;
    Matrix input;  // dL/dX, filled when requested
};

/// The four differentiable classifiers behind one forward/backward pair:
/// MLP (aggregation = identity), GCN (1/sqrt(d_i d_j)), and the two
/// message-passing variants that scale the same aggregation by phi(e_ij).
class DeepModel {
public:
    ModelConfig config;
    std::vector<DenseLayer> node_layers;  // hidden transforms
    DenseLayer readout;                   // last hidden -> logit
    std::vector<MessageNet> messages;     // one per layer for MP models

    DeepModel() = default;

    DeepModel(const ModelConfig& cfg, int input_dim) : config(cfg) {
        if (!is_deep_model(cfg.kind))
            throw std::invalid_argument("DeepModel: kind is not a neural model");
        Rng rng(derive_seed(cfg.seed, "init"));
        int in = input_dim;
        for (int width : cfg.hidden) {
            node_layers.push_back(glorot(width, in, rng));
            in = width;
        }
        readout = glorot(1, in, rng);
        if (cfg.kind == ModelKind::MP_GCN_S) {
            for (std::size_t l = 0; l < node_layers.size(); ++l) {
                MessageNet m;
                m.shallow = true;
                m.w = glorot(1, kCoUrlBins, rng).W.row(0).transpose();
                messages.push_back(std::move(m));
            }
        } else if (cfg.kind == ModelKind::MP_GCN) {
            for (std::size_t l = 0; l < node_layers.size(); ++l) {
                MessageNet m;
                m.shallow = false;
                int width_in = kCoUrlBins;
                for (int k = 0; k < cfg.message_layers; ++k) {
                    m.mlp.push_back(glorot(cfg.message_width, width_in, rng));
                    width_in = cfg.message_width;
                }
                m.mlp.push_back(glorot(1, width_in, rng));
                messages.push_back(std::move(m));
            }
        }
    }

    /// Forward pass over all nodes. Graph models need `g` and `es`; dropout
    /// is active only when `train_rng` is provided.
    ForwardCache forward(const Matrix& X, const CensoredGraph* g, const EdgeSet* es,
                         Rng* train_rng = nullptr) const {
        const bool graph_model = is_graph_model(config.kind);
        if (graph_model && (!g || !es))
            throw std::invalid_argument("forward: graph model without graph");
        ForwardCache cache;
        cache.X = X;
        Matrix H = X;
        cache.layers.resize(node_layers.size());
        for (std::size_t l = 0; l < node_layers.size(); ++l) {
            LayerCache& lc = cache.layers[l];
            lc.Z = (H * node_layers[l].W.transpose()).rowwise() +
                   node_layers[l].b.transpose();
            if (!graph_model) {
                lc.P = lc.Z;
            } else if (config.kind == ModelKind::GCN) {
                lc.P = gcn_aggregate(*g, lc.Z);
            } else {
                lc.msg = edge_messages(l, *es);
                if (train_rng && config.dropout_message > 0.0) {
                    lc.msg_drop = Vector::Zero(lc.msg.size());
                    const double keep = 1.0 - config.dropout_message;
                    for (Eigen::Index e = 0; e < lc.msg.size(); ++e)
                        lc.msg_drop(e) = train_rng->bernoulli(keep) ? 1.0 / keep : 0.0;
                    lc.msg = lc.msg.cwiseProduct(lc.msg_drop);
                }
                lc.P = mp_aggregate(*g, lc.Z, *es, lc.msg);
            }
            lc.H = lc.P.cwiseMax(0.0);
            if (train_rng && config.dropout_hidden > 0.0) {
                const double keep = 1.0 - config.dropout_hidden;
                lc.drop_mask = Matrix::Zero(lc.H.rows(), lc.H.cols());
                for (Eigen::Index r = 0; r < lc.H.rows(); ++r)
                    for (Eigen::Index c = 0; c < lc.H.cols(); ++c)
                        lc.drop_mask(r, c) = train_rng->bernoulli(keep) ? 1.0 / keep : 0.0;
                lc.H = lc.H.cwiseProduct(lc.drop_mask);
            }
            H = lc.H;
        }
        cache.logits = (H * readout.W.transpose()).col(0) +
                       Vector::Constant(H.rows(), readout.b(0));
        return cache;
    }

    /// Backprop from d(loss)/d(logit). Mirrors forward exactly; fills input
    /// gradients when `want_input_grad`.
    Gradients backward(const ForwardCache& cache, const Vector& dlogits,
                       const CensoredGraph* g, const EdgeSet* es,
                       bool want_input_grad = false) const {
        const bool graph_model = is_graph_model(config.kind);
        Gradients grads;
        grads.node_layers.resize(node_layers.size());
        grads.messages.resize(messages.size());

        const Matrix& last_H =
            cache.layers.empty() ? cache.X : cache.layers.back().H;
        grads.readout.W = (dlogits.transpose() * last_H);
        grads.readout.b = Vector::Constant(1, dlogits.sum());
        Matrix dH = dlogits * readout.W;  // n x width
        if (node_layers.empty()) {
            if (want_input_grad) grads.input = dH;
            return grads;
        }

        for (std::size_t li = node_layers.size(); li-- > 0;) {
            const LayerCache& lc = cache.layers[li];
            if (lc.drop_mask.size() > 0) dH = dH.cwiseProduct(lc.drop_mask);
            Matrix dP = dH.cwiseProduct((lc.P.array() > 0.0).cast<double>().matrix());
            Matrix dZ;
            if (!graph_model) {
                dZ = dP;
            } else {
                std::vector<double> inv_sqrt(g->n_nodes, 0.0);
                for (std::uint32_t v = 0; v < g->n_nodes; ++v)
                    if (g->degree(v) > 0)
                        inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g->degree(v)));
                dZ = Matrix::Zero(dP.rows(), dP.cols());
                Vector dmsg =
                    config.kind == ModelKind::GCN ? Vector() : Vector::Zero(es->size());
                for (std::uint32_t i = 0; i < g->n_nodes; ++i) {
                    auto [lo, hi] = g->adj(i);
                    for (auto it = lo; it != hi; ++it) {
                        const std::uint32_t j = *it;
                        const double base = inv_sqrt[i] * inv_sqrt[j];
                        if (config.kind == ModelKind::GCN) {
                            dZ.row(j) += base * dP.row(i);
                        } else {
                            const std::size_t e = es->slot_edge[static_cast<std::size_t>(
                                it - g->neighbors.data())];
                            const double m = lc.msg(static_cast<Eigen::Index>(e));
                            dZ.row(j) += (m * base) * dP.row(i);
                            dmsg(static_cast<Eigen::Index>(e)) +=
                                base * dP.row(i).dot(lc.Z.row(j));
                        }
                    }
                }
                if (config.kind != ModelKind::GCN)
                    message_backward(li, *es, lc, dmsg, grads.messages[li]);
            }
            const Matrix& below = li == 0 ? cache.X : cache.layers[li - 1].H;
            grads.node_layers[li].W = dZ.transpose() * below;
            grads.node_layers[li].b = dZ.colwise().sum().transpose();
            if (li > 0 || want_input_grad) dH = dZ * node_layers[li].W;
            if (li == 0 && want_input_grad) grads.input = dH;
        }
        return grads;
    }

    Vector predict_probabilities(const Matrix& X, const CensoredGraph* g,
                                 const EdgeSet* es) const {
        ForwardCache cache = forward(X, g, es, nullptr);
        Vector p(cache.logits.size());
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = sigmoid(cache.logits(i));
        return p;
    }

    nlohmann::json params_to_json() const {
        nlohmann::json j;
        auto mat = [](const Matrix& m) {
            nlohmann::json rows = nlohmann::json::array();
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                nlohmann::json row = nlohmann::json::array();
                for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
                rows.push_back(std::move(row));
            }
            return rows;
        };
        auto vec = [](const Vector& v) {
            nlohmann::json out = nlohmann::json::array();
            for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
            return out;
        };
        auto layer = [&](const DenseLayer& l) {
            return nlohmann::json{{"W", mat(l.W)}, {"b", vec(l.b)}};
        };
        j["node_layers"] = nlohmann::json::array();
        for (const auto& l : node_layers) j["node_layers"].push_back(layer(l));
        j["readout"] = layer(readout);
        j["messages"] = nlohmann::json::array();
        for (const auto& m : messages) {
            nlohmann::json jm{{"shallow", m.shallow}};
            if (m.shallow) jm["w"] = vec(m.w);
            else {
                jm["mlp"] = nlohmann::json::array();
                for (const auto& l : m.mlp) jm["mlp"].push_back(layer(l));
            }
            j["messages"].push_back(std::move(jm));
        }
        return j;
    }

    void params_from_json(const nlohmann::json& j) {
        auto mat = [](const nlohmann::json& rows) {
            Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                for (Eigen::Index c = 0; c < m.cols(); ++c)
                    m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                                  .get<double>();
            return m;
        };
        auto vec = [](const nlohmann::json& v) {
            Vector out(v.size());
            for (Eigen::Index i = 0; i < out.size(); ++i)
                out(i) = v[static_cast<std::size_t>(i)].get<double>();
            return out;
        };
        auto layer = [&](const nlohmann::json& l) {
            return DenseLayer{mat(l.at("W")), vec(l.at("b"))};
        };
        node_layers.clear();
        for (const auto& l : j.at("node_layers")) node_layers.push_back(layer(l));
        readout = layer(j.at("readout"));
        messages.clear();
        for (const auto& jm : j.at("messages")) {
            MessageNet m;
            m.shallow = jm.at("shallow").get<bool>();
            if (m.shallow) m.w = vec(jm.at("w"));
            else
                for (const auto& l : jm.at("mlp")) m.mlp.push_back(layer(l));
            messages.push_back(std::move(m));
        }
    }

private:
    static DenseLayer glorot(int out, int in, Rng& rng) {
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        DenseLayer l;
        l.W.resize(out, in);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) l.W(r, c) = rng.uniform(-limit, limit);
        l.b = Vector::Zero(out);
        return l;
    }

    Vector edge_messages(std::size_t layer, const EdgeSet& es) const {
        const MessageNet& net = messages[layer];
        Vector m(static_cast<Eigen::Index>(es.size()));
        if (net.shallow) {
            const Vector pre = es.features * net.w;
            for (Eigen::Index e = 0; e < m.size(); ++e) m(e) = sigmoid(pre(e));
        } else {
            Matrix A = es.features;
            for (std::size_t l = 0; l + 1 < net.mlp.size(); ++l)
                A = ((A * net.mlp[l].W.transpose()).rowwise() + net.mlp[l].b.transpose())
                        .cwiseMax(0.0);
            const Vector pre = (A * net.mlp.back().W.transpose()).col(0) +
                               Vector::Constant(A.rows(), net.mlp.back().b(0));
            for (Eigen::Index e = 0; e < m.size(); ++e) m(e) = sigmoid(pre(e));
        }
        return m;
    }

    void message_backward(std::size_t layer, const EdgeSet& es, const LayerCache& lc,
                          Vector dmsg, MessageNet& grad) const {
        const MessageNet& net = messages[layer];
        // undo dropout scaling, then sigmoid'
        if (lc.msg_drop.size() > 0) dmsg = dmsg.cwiseProduct(lc.msg_drop);
        Vector m_raw(lc.msg.size());
        if (lc.msg_drop.size() > 0) {
            // recover pre-dropout values for the sigmoid derivative; dropped
            // edges already have zero upstream gradient, so 0 is safe there
            for (Eigen::Index e = 0; e < lc.msg.size(); ++e)
                m_raw(e) = lc.msg_drop(e) > 0.0 ? lc.msg(e) / lc.msg_drop(e) : 0.0;
        } else {
            m_raw = lc.msg;
        }
        Vector dpre(dmsg.size());
        for (Eigen::Index e = 0; e < dmsg.size(); ++e)
            dpre(e) = dmsg(e) * m_raw(e) * (1.0 - m_raw(e));

        grad.shallow = net.shallow;
        if (net.shallow) {
            grad.w = es.features.transpose() * dpre;
            return;
        }
        grad.mlp.resize(net.mlp.size());
        // rebuild hidden activations (cheap relative to node layers)
        std::vector<Matrix> hidden;
        Matrix A = es.features;
        for (std::size_t l = 0; l + 1 < net.mlp.size(); ++l) {
            A = ((A * net.mlp[l].W.transpose()).rowwise() + net.mlp[l].b.transpose())
                    .cwiseMax(0.0);
            hidden.push_back(A);
        }
        const std::size_t L = net.mlp.size();
        const Matrix& last = L >= 2 ? hidden[L - 2] : es.features;
        grad.mlp[L - 1].W = dpre.transpose() * last;
        grad.mlp[L - 1].b = Vector::Constant(1, dpre.sum());
        Matrix dA = dpre * net.mlp[L - 1].W;
        for (std::size_t l = L - 1; l-- > 0;) {
            dA = dA.cwiseProduct((hidden[l].array() > 0.0).cast<double>().matrix());
            const Matrix& below = l == 0 ? es.features : hidden[l - 1];
            grad.mlp[l].W = dA.transpose() * below;
            grad.mlp[l].b = dA.colwise().sum().transpose();
            if (l > 0) dA = dA * net.mlp[l].W;
        }
    }

};

/// Adam step state per parameter tensor.
struct AdamState {
    Matrix mW, vW;
    Vector mb, vb;
};

class Adam {
public:
    Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(DenseLayer& p, const DenseLayer& g, AdamState& s) {
        ++steps_[&p];
        const int t = steps_[&p];
        if (s.mW.size() == 0) {
            s.mW = Matrix::Zero(p.W.rows(), p.W.cols());
            s.vW = s.mW;
            s.mb = Vector::Zero(p.b.size());
            s.vb = s.mb;
        }
        update(p.W, g.W, s.mW, s.vW, t);
        update(p.b, g.b, s.mb, s.vb, t);
    }

    void step_vector(Vector& p, const Vector& g, AdamState& s) {
        ++steps_[&p];
        const int t = steps_[&p];
        if (s.mb.size() == 0) {
            s.mb = Vector::Zero(p.size());
            s.vb = s.mb;
        }
        update(p, g, s.mb, s.vb, t);
    }

private:
    template <typename T>
    void update(T& p, const T& g, T& m, T& v, int t) {
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
        const double bc1 = 1.0 - std::pow(beta1_, t);
        const double bc2 = 1.0 - std::pow(beta2_, t);
        p.array() -= lr_ * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps_);
    }

    double lr_, beta1_, beta2_, eps_;
    std::unordered_map<const void*, int> steps_;
};

struct EpochLog {
    double loss = 0.0;
    double val_f1 = 0.0;
};

struct TrainedModel {
    ModelConfig config;
    InputLayout layout;
    DeepModel model;
    std::vector<EpochLog> log;
    int best_epoch = -1;
};

inline void check_finite(const Matrix& X) {
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        for (Eigen::Index c = 0; c < X.cols(); ++c)
            if (!std::isfinite(X(r, c)))
                throw std::runtime_error("non-finite input at row " + std::to_string(r) +
                                         ", feature " + std::to_string(c));
}

inline double f1_score_at_half(const Vector& probs, const std::vector<int>& labels,
                               const std::vector<std::uint32_t>& subset) {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (auto i : subset) {
        const bool pred = probs(i) >= 0.5;  // ties go positive
        if (pred && labels[i] == 1) ++tp;
        else if (pred && labels[i] == 0) ++fp;
        else if (!pred && labels[i] == 1) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

/// Full-graph training: every epoch runs one forward over all nodes, with the
/// binary cross entropy masked to the training nodes, Adam at the configured
/// learning rate, and early stopping on validation F1 with best-checkpoint
/// restore. Deterministic under config.seed.
inline TrainedModel train_deep(const ModelConfig& config, const Matrix& X,
                               const CensoredGraph* g, const EdgeSet* es,
                               const std::vector<int>& labels,
                               const std::vector<std::uint32_t>& train_idx,
                               const std::vector<std::uint32_t>& val_idx) {
    check_finite(X);
    if (train_idx.empty()) throw std::runtime_error("train_deep: empty training set");
    {
        bool has0 = false, has1 = false;
        for (auto i : train_idx) (labels[i] ? has1 : has0) = true;
        if (!has0 || !has1)
            throw std::runtime_error("train_deep: single-class training set");
    }

    TrainedModel out;
    out.config = config;
    out.model = DeepModel(config, static_cast<int>(X.cols()));
    DeepModel& model = out.model;

    Adam adam(config.learning_rate);
    std::vector<AdamState> node_states(model.node_layers.size());
    AdamState readout_state;
    std::vector<AdamState> msg_w_states(model.messages.size());
    std::vector<std::vector<AdamState>> msg_mlp_states(model.messages.size());
    for (std::size_t i = 0; i < model.messages.size(); ++i)
        msg_mlp_states[i].resize(model.messages[i].mlp.size());

    Rng dropout_rng(derive_seed(config.seed, "dropout"));
    DeepModel best = model;
    double best_val = -1.0;
    int since_best = 0;

    const double inv_n = 1.0 / static_cast<double>(train_idx.size());
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        ForwardCache cache = model.forward(X, g, es, &dropout_rng);
        double loss = 0.0;
        Vector dlogits = Vector::Zero(cache.logits.size());
        for (auto i : train_idx) {
            const double z = cache.logits(i);
            loss += softplus(z) - static_cast<double>(labels[i]) * z;
            dlogits(i) = (sigmoid(z) - static_cast<double>(labels[i])) * inv_n;
        }
        loss *= inv_n;
        if (!std::isfinite(loss))
            throw std::runtime_error("train_deep: loss diverged at epoch " +
                                     std::to_string(epoch));

        Gradients grads = model.backward(cache, dlogits, g, es);
        for (std::size_t l = 0; l < model.node_layers.size(); ++l)
            adam.step(model.node_layers[l], grads.node_layers[l], node_states[l]);
        adam.step(model.readout, grads.readout, readout_state);
        for (std::size_t m = 0; m < model.messages.size(); ++m) {
            if (model.messages[m].shallow) {
                adam.step_vector(model.messages[m].w, grads.messages[m].w,
                                 msg_w_states[m]);
            } else {
                for (std::size_t l = 0; l < model.messages[m].mlp.size(); ++l)
                    adam.step(model.messages[m].mlp[l], grads.messages[m].mlp[l],
                              msg_mlp_states[m][l]);
            }
        }

        const Vector val_probs = model.predict_probabilities(X, g, es);
        const double val_f1 = f1_score_at_half(val_probs, labels, val_idx);
        out.log.push_back({loss, val_f1});

        if (val_f1 > best_val) {
            best_val = val_f1;
            best = model;
            out.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            break;
        }
    }
    model = best;
    return out;
}

struct PredictionSet {
    Vector probability;
    std::vector<int> label;  // threshold 0.5, ties positive
};

inline PredictionSet predict(const DeepModel& model, const Matrix& X,
                             const CensoredGraph* g, const EdgeSet* es) {
    check_finite(X);
    PredictionSet p;
    p.probability = model.predict_probabilities(X, g, es);
    p.label.resize(static_cast<std::size_t>(p.probability.size()));
    for (Eigen::Index i = 0; i < p.probability.size(); ++i)
        p.label[static_cast<std::size_t>(i)] = p.probability(i) >= 0.5 ? 1 : 0;
    return p;
}

}  // namespace coordgraph::nn

#endif

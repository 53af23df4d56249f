#ifndef COORDGRAPH_SPECTRAL_HPP
#define COORDGRAPH_SPECTRAL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "coordgraph/graph.hpp"

namespace coordgraph {

/// Shared spectral workspace: eigendecomposition of the symmetric-normalized
/// adjacency S = D^{-1/2} A D^{-1/2} restricted to non-isolated nodes. The
/// normalized Laplacian is I - S on that block, and diag((D^{-1}A)^k) equals
/// diag(S^k), so one solve serves both Laplacian Eigenmaps and RWPE.
struct SpectralBasis {
    std::vector<std::uint32_t> active;  // nodes with degree >= 1, ascending
    Eigen::VectorXd eigenvalues;        // of S, ascending
    Eigen::MatrixXd eigenvectors;       // columns matched to eigenvalues
};

inline SpectralBasis spectral_basis(const CensoredGraph& g) {
    SpectralBasis basis;
    for (std::uint32_t v = 0; v < g.n_nodes; ++v)
        if (g.degree(v) > 0) basis.active.push_back(v);
    const std::size_t m = basis.active.size();
    if (m == 0) return basis;

    std::vector<std::uint32_t> pos(g.n_nodes, UINT32_MAX);
    for (std::uint32_t k = 0; k < m; ++k) pos[basis.active[k]] = k;

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
    for (std::uint32_t k = 0; k < m; ++k) {
        const std::uint32_t v = basis.active[k];
        const double dv = static_cast<double>(g.degree(v));
        auto [lo, hi] = g.adj(v);
        for (auto it = lo; it != hi; ++it) {
            const double du = static_cast<double>(g.degree(*it));
            S(k, pos[*it]) = 1.0 / std::sqrt(dv * du);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_basis: eigensolver failed");
    basis.eigenvalues = solver.eigenvalues();
    basis.eigenvectors = solver.eigenvectors();
    return basis;
}

/// Laplacian Eigenmaps: eigenvectors of L = I - S for the `dim` smallest
/// non-trivial eigenvalues. One zero eigenvalue per connected component is
/// skipped; missing directions are zero-padded; each kept eigenvector has its
/// largest-magnitude entry made positive so the output is sign-stable.
/// Isolated nodes get zero rows.
inline Eigen::MatrixXd laplacian_eigenmaps(const CensoredGraph& g, int dim = 50,
                                           const SpectralBasis* cached = nullptr) {
    if (dim < 1) throw std::invalid_argument("laplacian_eigenmaps: dim < 1");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.n_nodes, dim);
    SpectralBasis local;
    const SpectralBasis& basis = cached ? *cached : (local = spectral_basis(g), local);
    const std::size_t m = basis.active.size();
    if (m == 0) return out;

    // L eigenvalues are 1 - lambda(S); ascending in L = descending in S.
    constexpr double kZeroTol = 1e-9;
    int col = 0;
    for (std::size_t idx = m; idx-- > 0 && col < dim;) {
        const double mu = 1.0 - basis.eigenvalues(idx);
        if (mu < kZeroTol) continue;  // trivial component eigenvector
        Eigen::VectorXd vec = basis.eigenvectors.col(idx);
        int argmax = 0;
        vec.cwiseAbs().maxCoeff(&argmax);
        if (vec(argmax) < 0.0) vec = -vec;
        for (std::size_t k = 0; k < m; ++k) out(basis.active[k], col) = vec(k);
        ++col;
    }
    return out;
}

/// Random-walk positional encoding: component k is [(D^{-1}A)^k]_ii for
/// k = 1..k_max, computed through the spectral identity
/// diag(P^k)_i = sum_j U_ij^2 lambda_j^k. Isolated nodes (0/0 -> 0) get zeros.
inline Eigen::MatrixXd rwpe(const CensoredGraph& g, int k_max = 50,
                            const SpectralBasis* cached = nullptr) {
    if (k_max < 1) throw std::invalid_argument("rwpe: k_max < 1");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.n_nodes, k_max);
    SpectralBasis local;
    const SpectralBasis& basis = cached ? *cached : (local = spectral_basis(g), local);
    const std::size_t m = basis.active.size();
    if (m == 0) return out;

    const Eigen::MatrixXd U2 = basis.eigenvectors.cwiseProduct(basis.eigenvectors);
    Eigen::VectorXd lambda_k = basis.eigenvalues;
    for (int k = 1; k <= k_max; ++k) {
        const Eigen::VectorXd diag = U2 * lambda_k;
        for (std::size_t r = 0; r < m; ++r) out(basis.active[r], k - 1) = diag(r);
        lambda_k = lambda_k.cwiseProduct(basis.eigenvalues);
    }
    return out;
}

}  // namespace coordgraph

#endif

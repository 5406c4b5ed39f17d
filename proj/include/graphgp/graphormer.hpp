#pragma once

#include "graphgp/graph.hpp"
#include "graphgp/kernels.hpp"

#include <map>
#include <optional>

// Graphormer-GP: positional-encoding covariance builders, the augmented-kernel
// mix, and the linear-attention step with optional structural-bias term.

namespace graphgp {

enum class PeKind { LaplacianEigvec, SpectralReconstruction, Centrality };

inline std::string to_string(PeKind k) {
    switch (k) {
        case PeKind::LaplacianEigvec: return "laplacian-eigvec";
        case PeKind::SpectralReconstruction: return "spectral-reconstruction";
        case PeKind::Centrality: return "centrality";
    }
    return "?";
}

/// Covariance R of the positional encodings, consumed by the augmented kernel
/// only through inner products.
struct PositionalCovariance {
    Matrix R;
    PeKind kind = PeKind::LaplacianEigvec;
    int rank_k = 0;

    void check_invariants() const {
        if (!is_symmetric(R, 1e-8))
            throw InvalidKernelError("kernel_engine.PositionalCovariance", "R must be symmetric");
        if (smallest_eigenvalue(R) < -1e-8 * std::max(1.0, R.diagonal().maxCoeff()))
            throw InvalidKernelError("kernel_engine.PositionalCovariance", "R must be PSD within 1e-8");
    }
};

/// Builds R for the three encodings:
///  - laplacian-eigvec: R = P P^T, P = first rank_k Laplacian eigenvectors
///  - spectral-reconstruction: R = sum_{i<rank_k} lambda_i u_i u_i^T
///  - centrality: R_ab = sigma_CE^2 * 1[deg(a) = deg(b)] (binarized degrees)
inline PositionalCovariance build_positional_covariance(const Graph& g, PeKind kind, int rank_k,
                                                        const HyperParams& hp) {
    const char* where = "kernel_engine.build_positional_covariance";
    PositionalCovariance pe;
    pe.kind = kind;
    pe.rank_k = rank_k;

    if (kind == PeKind::Centrality) {
        IntVector deg(g.n);
        for (int i = 0; i < g.n; ++i) {
            int d = 0;
            for (int j = 0; j < g.n; ++j)
                if (j != i && g.adjacency(i, j) > 0.0) ++d;
            deg(i) = d;
        }
        pe.R = Matrix::Zero(g.n, g.n);
        for (int a = 0; a < g.n; ++a)
            for (int b = 0; b < g.n; ++b)
                if (deg(a) == deg(b)) pe.R(a, b) = hp.sigma_CE2;
        return pe;
    }

    if (rank_k < 1 || rank_k > g.n)
        throw InvalidParameterError(where, "rank_k must lie in [1, n] for spectral encodings");
    SpectralDecomposition spec = normalized_laplacian_spectrum(g);
    if (kind == PeKind::LaplacianEigvec) {
        Matrix p = spec.eigenvectors.leftCols(rank_k);
        pe.R = symmetrized(p * p.transpose());
    } else {
        Matrix p = spec.eigenvectors.leftCols(rank_k);
        Vector lam = spec.eigenvalues.head(rank_k);
        pe.R = symmetrized(p * lam.asDiagonal() * p.transpose());
    }
    return pe;
}

/// Augmented kernel: alpha K + (1 - alpha) R.
inline Matrix graphormer_augment(const Matrix& k, const Matrix& r, const HyperParams& hp) {
    if (r.rows() != k.rows() || r.cols() != k.cols())
        throw InvalidParameterError("kernel_engine.graphormer_augment", "kernel/R shape mismatch");
    return hp.alpha * k + (1.0 - hp.alpha) * r;
}

/// Linear-attention Graphormer step:
///   Sigma_ab = sH^2 sw^2 [ sQ^2 sK^2 Ktilde_ab * sum_ij Ktilde_ij^2
///                          + sb^2 sum_ij Ktilde_ij 1[rel(a,i) = rel(b,j)] ].
/// The bias sum is grouped by bucket: sum_r (M_r Ktilde M_r^T)_ab with M_r the
/// 0/1 indicator of bucket r. A relation is required only when sigma_b2 > 0.
inline Matrix graphormer_step_linear(const Matrix& ktilde, const StructuralRelation* rel,
                                     const HyperParams& hp) {
    const char* where = "kernel_engine.graphormer_step_linear";
    Eigen::Index n = ktilde.rows();
    double z = hp.sigma_Q2 * hp.sigma_K2 * ktilde.cwiseProduct(ktilde).sum();
    Matrix out = z * ktilde;

    if (hp.sigma_b2 > 0.0) {
        if (rel == nullptr)
            throw InvalidParameterError(where, "sigma_b2 > 0 requires a structural relation");
        if (rel->relation.rows() != n || rel->relation.cols() != n)
            throw InvalidParameterError(where, "relation/kernel shape mismatch");
        std::map<int, Matrix> indicators;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                auto [it, fresh] = indicators.try_emplace(rel->relation(i, j));
                if (fresh) it->second = Matrix::Zero(n, n);
                it->second(i, j) = 1.0;
            }
        Matrix bias = Matrix::Zero(n, n);
        for (const auto& [bucket, m] : indicators) bias += m * ktilde * m.transpose();
        out += hp.sigma_b2 * bias;
    }
    return symmetrized(hp.sigma_H2 * hp.sigma_w2 * out);
}

} // namespace graphgp

#pragma once

#include "graphgp/kernels.hpp"

#include <vector>

// GTN-GP step for heterogeneous graphs: the meta-path sum over all length-K
// compositions of row-normalized relation adjacencies, computed by K-fold
// application of Phi(M) = sum_i Atilde_i M Atilde_i^T. The explicit
// |T|^K enumeration anchors correctness in tests.

namespace graphgp {

/// Row-normalizes each relation adjacency: Atilde_i = D_i^{-1} A_i.
inline std::vector<Matrix> gtn_normalize_relations(const std::vector<Matrix>& relations) {
    const char* where = "kernel_engine.gtn_step";
    if (relations.empty()) throw InvalidParameterError(where, "need at least one relation type");
    std::vector<Matrix> norm;
    norm.reserve(relations.size());
    for (std::size_t t = 0; t < relations.size(); ++t) {
        const Matrix& a = relations[t];
        if (a.rows() != a.cols())
            throw InvalidParameterError(where, "relation " + std::to_string(t) + " must be square");
        Vector deg = a.rowwise().sum();
        for (Eigen::Index i = 0; i < deg.size(); ++i)
            if (!(deg(i) > 0.0))
                throw DegenerateError(where, "relation " + std::to_string(t) + " has zero-degree row " +
                                                 std::to_string(i));
        norm.push_back(deg.cwiseInverse().asDiagonal() * a);
    }
    return norm;
}

/// GTN kernel step with meta-path length K:
///   Sigma = sH^2 sw^2 (prod_k s_k^2) sum_{i_1..i_K}
///           (Atilde_{i_1}...Atilde_{i_K}) K (Atilde_{i_K}^T...Atilde_{i_1}^T).
inline Matrix gtn_step(const Matrix& k, const std::vector<Matrix>& relations, int meta_path_len,
                       const HyperParams& hp) {
    const char* where = "kernel_engine.gtn_step";
    if (meta_path_len < 1) throw InvalidParameterError(where, "meta_path_len must be >= 1");
    std::vector<Matrix> atil = gtn_normalize_relations(relations);
    for (const Matrix& a : atil)
        if (a.rows() != k.rows())
            throw InvalidParameterError(where, "relation/kernel shape mismatch");

    double var_prod = 1.0;
    if (!hp.gtn_sigma_k2.empty()) {
        if (static_cast<int>(hp.gtn_sigma_k2.size()) != meta_path_len)
            throw InvalidParameterError(where, "gtn_sigma_k2 must have one entry per meta-path step");
        for (double v : hp.gtn_sigma_k2) var_prod *= v;
    }

    Matrix m = k;
    for (int step = 0; step < meta_path_len; ++step) {
        Matrix next = Matrix::Zero(k.rows(), k.cols());
        for (const Matrix& a : atil) next += a * m * a.transpose();
        m = std::move(next);
    }
    return symmetrized(hp.sigma_H2 * hp.sigma_w2 * var_prod * m);
}

} // namespace graphgp

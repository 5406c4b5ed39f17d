#pragma once

#include "graphgp/common.hpp"

#include <string>
#include <vector>

// Kernel-engine basics: weight-prior hyperparameters, the tagged kernel
// matrix, the ReLU and LayerNorm kernel maps, and the GCN step. The
// architecture-specific attention steps live in gat.hpp / graphormer.hpp /
// specformer.hpp / gtn.hpp.

namespace graphgp {

/// Gaussian weight-prior variances. Defaults are all 1 (the scale-free
/// setting used by the theory); the Graphormer structural bias is opt-in via
/// sigma_b2 > 0.
struct HyperParams {
    double sigma_w2 = 1.0;
    double sigma_v2 = 1.0;
    double sigma_H2 = 1.0;
    double sigma_Q2 = 1.0;
    double sigma_K2 = 1.0;
    double sigma_b2 = 0.0;
    double sigma_V2 = 1.0;
    double sigma_O2 = 1.0;
    double sigma_lambda2 = 1.0;
    double sigma_CE2 = 1.0;
    double alpha = 0.5;                  // Graphormer mixing weight
    std::vector<double> gtn_sigma_k2;    // per-step GTN variances; empty = all 1

    void validate() const {
        const double* vars[] = {&sigma_w2, &sigma_v2, &sigma_H2, &sigma_Q2, &sigma_K2,
                                &sigma_b2, &sigma_V2, &sigma_O2, &sigma_lambda2, &sigma_CE2};
        for (const double* v : vars)
            if (*v < 0.0)
                throw InvalidParameterError("kernel_engine.HyperParams", "variances must be >= 0");
        for (double v : gtn_sigma_k2)
            if (v < 0.0)
                throw InvalidParameterError("kernel_engine.HyperParams", "gtn variances must be >= 0");
        if (alpha < 0.0 || alpha > 1.0)
            throw InvalidParameterError("kernel_engine.HyperParams", "alpha must lie in [0, 1]");
    }
};

enum class ModelTag { GCN, GAT, Graphormer, Specformer, GTN, Input };

enum class KernelStage { PreActivation, PostActivation };

inline std::string to_string(ModelTag m) {
    switch (m) {
        case ModelTag::GCN: return "GCN";
        case ModelTag::GAT: return "GAT";
        case ModelTag::Graphormer: return "Graphormer";
        case ModelTag::Specformer: return "Specformer";
        case ModelTag::GTN: return "GTN";
        case ModelTag::Input: return "Input";
    }
    return "?";
}

/// Dense symmetric PSD kernel with provenance (model, layer, stage).
struct KernelMatrix {
    Matrix values;
    int layer = 0;
    ModelTag model = ModelTag::Input;
    KernelStage stage = KernelStage::PostActivation;

    int n() const { return static_cast<int>(values.rows()); }

    /// Type invariants: symmetry within 1e-10, nonnegative diagonal, smallest
    /// eigenvalue >= -1e-8 * max diagonal. O(n^3); used by tests and guards.
    void check_invariants() const {
        if (!is_symmetric(values, 1e-10 * std::max(1.0, values.cwiseAbs().maxCoeff())))
            throw InvalidKernelError("kernel_engine.KernelMatrix", "kernel not symmetric");
        double max_diag = values.diagonal().maxCoeff();
        if (values.diagonal().minCoeff() < 0.0)
            throw InvalidKernelError("kernel_engine.KernelMatrix", "negative diagonal entry");
        if (smallest_eigenvalue(values) < -1e-8 * std::max(max_diag, 1e-300))
            throw InvalidKernelError("kernel_engine.KernelMatrix", "kernel not PSD within tolerance");
    }
};

// ============================================================================
// Kernel maps
// ============================================================================

/// ReLU NNGP map: K_ab = sqrt(S_aa S_bb) (sin t + (pi - t) cos t) / (2 pi)
/// with t = arccos(S_ab / sqrt(S_aa S_bb)), argument clamped to [-1, 1].
/// Degree-1 positively homogeneous. Requires strictly positive diagonal.
inline Matrix relu_kernel_map(const Matrix& sigma) {
    const char* where = "kernel_engine.relu_kernel_map";
    Eigen::Index n = sigma.rows();
    for (Eigen::Index a = 0; a < n; ++a) {
        double d = sigma(a, a);
        if (d < 0.0)
            throw InvalidKernelError(where, "negative variance at node " + std::to_string(a));
        if (d <= 1e-14)
            throw DegenerateError(where, "zero-variance node " + std::to_string(a));
    }
    constexpr double pi = 3.141592653589793238462643383279502884;
    Matrix k(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a; b < n; ++b) {
            double scale = std::sqrt(sigma(a, a) * sigma(b, b));
            double c = sigma(a, b) / scale;
            c = std::clamp(c, -1.0, 1.0);
            double theta = std::acos(c);
            double v = scale * (std::sin(theta) + (pi - theta) * std::cos(theta)) / (2.0 * pi);
            k(a, b) = v;
            k(b, a) = v;
        }
    }
    return k;
}

/// LayerNorm kernel: K_ab / sqrt(K_aa K_bb). Unit diagonal, scale invariant,
/// idempotent.
inline Matrix layernorm_kernel_map(const Matrix& k) {
    const char* where = "kernel_engine.layernorm_kernel_map";
    Eigen::Index n = k.rows();
    Vector d = k.diagonal();
    for (Eigen::Index a = 0; a < n; ++a)
        if (!(d(a) > 0.0))
            throw DegenerateError(where, "non-positive diagonal at node " + std::to_string(a));
    Vector s = d.cwiseSqrt().cwiseInverse();
    Matrix out = s.asDiagonal() * k * s.asDiagonal();
    out.diagonal().setOnes();
    return symmetrized(out);
}

// ============================================================================
// GCN step
// ============================================================================

/// K -> sigma_w^2 S K S^T with S the graph operator (normalized adjacency or
/// raw A for the population theory).
inline Matrix gcn_step(const Matrix& k, const Matrix& s, const HyperParams& hp) {
    if (s.rows() != k.rows() || s.cols() != k.rows())
        throw InvalidParameterError("kernel_engine.gcn_step", "operator/kernel shape mismatch");
    return symmetrized(hp.sigma_w2 * (s * k * s.transpose()));
}

} // namespace graphgp

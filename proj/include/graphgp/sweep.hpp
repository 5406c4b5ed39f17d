#pragma once

#include "graphgp/gat.hpp"
#include "graphgp/graph.hpp"
#include "graphgp/graphormer.hpp"
#include "graphgp/gtn.hpp"
#include "graphgp/kernels.hpp"
#include "graphgp/specformer.hpp"

#include <optional>
#include <vector>

// Layerwise kernel-trajectory orchestration: K^(0) from features (or an
// explicit block initialization), then per layer the model step, the optional
// ReLU kernel map and the optional LayerNorm map.

namespace graphgp {

enum class Activation { Identity, Relu };
enum class GcnOperator { Normalized, Raw };
enum class GatAttention { Linear, Relu };

struct SweepOptions {
    Activation activation = Activation::Relu;
    bool layernorm = true;
    // Order within a layer is step -> activation -> LayerNorm unless flipped.
    bool layernorm_before_activation = false;
    bool add_self_loops = false;

    GcnOperator gcn_operator = GcnOperator::Normalized;
    GatAttention gat_attention = GatAttention::Linear;

    std::optional<PositionalCovariance> pe;      // Graphormer mixing prior
    std::optional<StructuralRelation> relation;  // Graphormer bias buckets

    // Specformer eigenvalue-encoding stack
    int token_layers = 1;
    int token_embed_dim = 16;
    double token_epsilon = 2.0;
    DecoderNonlinearity decoder = DecoderNonlinearity::Identity;
    std::optional<Vector> spectral_filter;       // explicit lambda-bar overriding the token stack

    // GTN
    std::vector<Matrix> gtn_relations;
    int meta_path_len = 1;

    std::optional<Matrix> initial_kernel;        // overrides the feature Gram
};

/// Feature-Gram initial kernel K^(0)_ab = x_a . x_b / d_in.
inline Matrix initial_feature_kernel(const Graph& g) {
    if (!g.has_features())
        throw InvalidParameterError("kernel_engine.initial_feature_kernel",
                                    "graph has no features; provide an initial kernel");
    return symmetrized(g.features * g.features.transpose() /
                       static_cast<double>(g.features.cols()));
}

/// Runs `depth` layers of the chosen model and returns the full post-layer
/// trajectory [K^(0), ..., K^(depth)].
inline std::vector<KernelMatrix> run_depth_sweep(const Graph& graph, ModelTag model,
                                                 const HyperParams& hp, int depth,
                                                 const SweepOptions& options) {
    const char* where = "kernel_engine.run_depth_sweep";
    hp.validate();
    if (depth < 0) throw InvalidParameterError(where, "depth must be >= 0");

    Graph g = options.add_self_loops ? with_self_loops(graph) : graph;

    Matrix k0 = options.initial_kernel ? *options.initial_kernel : initial_feature_kernel(g);
    if (k0.rows() != g.n || k0.cols() != g.n)
        throw InvalidParameterError(where, "initial kernel must be n x n");

    // Per-model fixed state.
    Matrix op;                      // GCN operator
    SpectralDecomposition spec;     // Specformer eigenbasis
    Matrix klambda;                 // Specformer filter kernel
    const Matrix* mix_r = nullptr;  // Graphormer prior
    switch (model) {
        case ModelTag::GCN:
            op = options.gcn_operator == GcnOperator::Normalized ? normalized_adjacency(g)
                                                                 : g.adjacency;
            break;
        case ModelTag::GAT:
            break;
        case ModelTag::Graphormer: {
            if (options.pe) {
                mix_r = &options.pe->R;
            } else if (!(hp.alpha == 1.0 && options.relation && hp.sigma_b2 > 0.0)) {
                throw InvalidParameterError(
                    where, "Graphormer needs a positional covariance (or alpha=1 with a "
                           "structural relation and sigma_b2 > 0)");
            }
            break;
        }
        case ModelTag::Specformer: {
            spec = normalized_laplacian_spectrum(g);
            if (options.spectral_filter) {
                if (options.spectral_filter->size() != g.n)
                    throw InvalidParameterError(where, "spectral_filter must have length n");
                klambda = (*options.spectral_filter) * options.spectral_filter->transpose();
            } else {
                Matrix kh = specformer_token_kernel_init(spec, options.token_embed_dim,
                                                         options.token_epsilon);
                for (int t = 0; t < options.token_layers; ++t)
                    kh = specformer_token_step_linear(kh, hp);
                klambda = specformer_lambda_kernel(kh, hp, options.decoder);
            }
            break;
        }
        case ModelTag::GTN:
            if (options.gtn_relations.empty())
                throw InvalidParameterError(where, "GTN needs relation adjacencies");
            break;
        case ModelTag::Input:
            throw InvalidParameterError(where, "Input is not a runnable model");
    }

    std::vector<KernelMatrix> trajectory;
    trajectory.reserve(static_cast<std::size_t>(depth) + 1);
    trajectory.push_back({k0, 0, model, KernelStage::PostActivation});

    Matrix k = std::move(k0);
    for (int layer = 1; layer <= depth; ++layer) {
        Matrix sigma;
        switch (model) {
            case ModelTag::GCN:
                sigma = gcn_step(k, op, hp);
                break;
            case ModelTag::GAT:
                sigma = options.gat_attention == GatAttention::Linear
                            ? gat_step_linear(k, g.adjacency, hp)
                            : gat_step_relu_attention(k, g.adjacency, hp);
                break;
            case ModelTag::Graphormer: {
                Matrix ktilde = mix_r ? graphormer_augment(k, *mix_r, hp) : k;
                sigma = graphormer_step_linear(
                    ktilde, options.relation ? &*options.relation : nullptr, hp);
                break;
            }
            case ModelTag::Specformer:
                sigma = specformer_node_step(k, spec, klambda, hp);
                break;
            case ModelTag::GTN:
                sigma = gtn_step(k, options.gtn_relations, options.meta_path_len, hp);
                break;
            case ModelTag::Input:
                break;
        }

        auto apply_activation = [&](Matrix m) {
            return options.activation == Activation::Relu ? relu_kernel_map(m) : m;
        };
        auto apply_layernorm = [&](Matrix m) {
            return options.layernorm ? layernorm_kernel_map(m) : m;
        };
        k = options.layernorm_before_activation ? apply_activation(apply_layernorm(std::move(sigma)))
                                                : apply_layernorm(apply_activation(std::move(sigma)));
        trajectory.push_back({k, layer, model, KernelStage::PostActivation});
    }
    return trajectory;
}

/// Per-layer trajectory summary. Community statistics are filled only when
/// labels are given: intra/inter means are over off-diagonal same/cross-label
/// pairs and ratio = inter/intra.
struct LayerSummary {
    int layer = 0;
    double trace = 0.0;
    double min_eig = 0.0;
    double intra_mean = 0.0;
    double inter_mean = 0.0;
    double ratio = 0.0;
    bool has_community_stats = false;
};

inline LayerSummary summarize_kernel(const KernelMatrix& km, const std::optional<IntVector>& labels) {
    LayerSummary s;
    s.layer = km.layer;
    s.trace = km.values.trace();
    s.min_eig = smallest_eigenvalue(km.values);
    if (labels && labels->size() == km.values.rows()) {
        double intra = 0.0, inter = 0.0;
        long intra_count = 0, inter_count = 0;
        int n = km.n();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if ((*labels)(i) == (*labels)(j)) {
                    intra += km.values(i, j);
                    ++intra_count;
                } else {
                    inter += km.values(i, j);
                    ++inter_count;
                }
            }
        if (intra_count > 0 && inter_count > 0) {
            s.intra_mean = intra / static_cast<double>(intra_count);
            s.inter_mean = inter / static_cast<double>(inter_count);
            s.ratio = s.intra_mean != 0.0 ? s.inter_mean / s.intra_mean
                                          : std::numeric_limits<double>::quiet_NaN();
            s.has_community_stats = true;
        }
    }
    return s;
}

} // namespace graphgp

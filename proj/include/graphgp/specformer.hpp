#pragma once

#include "graphgp/graph.hpp"
#include "graphgp/kernels.hpp"

// Specformer-GP: sinusoidal spectral-token kernel initialization, the linear
// token-attention recursion, the learned-filter kernel K_lambda, and the node
// step that modulates the kernel in the Laplacian eigenbasis.

namespace graphgp {

/// Initial spectral-token rows: row a is (lambda_a || rho(lambda_a)) with rho
/// the sin/cos encoding rho(l, 2t) = sin(eps*l / 10000^{2t/d}),
/// rho(l, 2t+1) = cos(...). Shape n x (d+1).
inline Matrix specformer_token_features(const SpectralDecomposition& spec, int embed_dim,
                                        double epsilon) {
    const char* where = "kernel_engine.specformer_token_features";
    if (embed_dim < 2 || embed_dim % 2 != 0)
        throw InvalidParameterError(where, "embed_dim must be even and >= 2");
    Eigen::Index n = spec.eigenvalues.size();
    Matrix h(n, embed_dim + 1);
    for (Eigen::Index a = 0; a < n; ++a) {
        double lam = spec.eigenvalues(a);
        h(a, 0) = lam;
        for (int t = 0; 2 * t < embed_dim; ++t) {
            double freq = epsilon * lam / std::pow(10000.0, (2.0 * t) / embed_dim);
            h(a, 1 + 2 * t) = std::sin(freq);
            h(a, 1 + 2 * t + 1) = std::cos(freq);
        }
    }
    return h;
}

/// Initial spectral-token kernel: the Gram of the token rows divided by the
/// actual row dimension d+1 (the constant rescaling relative to a divisor of
/// d is absorbed by the sigma parameters).
inline Matrix specformer_token_kernel_init(const SpectralDecomposition& spec, int embed_dim,
                                           double epsilon) {
    Matrix h = specformer_token_features(spec, embed_dim, epsilon);
    return symmetrized(h * h.transpose() / static_cast<double>(embed_dim + 1));
}

/// Linear token-attention step: K <- sO^2 sV^2 sQ^2 sK^2 * K^3 (the matrix
/// triple product realizes the double sum over token pairs; the entrywise-sum
/// oracle pins the index convention in tests).
inline Matrix specformer_token_step_linear(const Matrix& kh, const HyperParams& hp) {
    if (kh.rows() != kh.cols())
        throw InvalidParameterError("kernel_engine.specformer_token_step_linear", "kernel must be square");
    double c = hp.sigma_O2 * hp.sigma_V2 * hp.sigma_Q2 * hp.sigma_K2;
    return symmetrized(c * (kh * kh * kh));
}

enum class DecoderNonlinearity { Identity, Relu };

/// Learned-filter kernel after T token layers: the decoder weight variance
/// scales the terminal token kernel; a ReLU decoder routes through the ReLU
/// NNGP map.
inline Matrix specformer_lambda_kernel(const Matrix& kh_terminal, const HyperParams& hp,
                                       DecoderNonlinearity decoder) {
    Matrix base = hp.sigma_lambda2 * kh_terminal;
    if (decoder == DecoderNonlinearity::Identity) return base;
    return relu_kernel_map(base);
}

/// Node step: Sigma = sH^2 sw^2 U (K_lambda .* (U^T K U)) U^T.
inline Matrix specformer_node_step(const Matrix& k, const SpectralDecomposition& spec,
                                   const Matrix& klambda, const HyperParams& hp) {
    const char* where = "kernel_engine.specformer_node_step";
    Eigen::Index n = k.rows();
    if (spec.eigenvectors.rows() != n || spec.eigenvectors.cols() != n)
        throw InvalidParameterError(where, "eigenbasis/kernel shape mismatch");
    if (klambda.rows() != n || klambda.cols() != n)
        throw InvalidParameterError(where, "K_lambda/kernel shape mismatch");
    const Matrix& u = spec.eigenvectors;
    Matrix inner = klambda.cwiseProduct(u.transpose() * k * u);
    return symmetrized(hp.sigma_H2 * hp.sigma_w2 * (u * inner * u.transpose()));
}

} // namespace graphgp

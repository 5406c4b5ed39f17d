#pragma once

#include "graphgp/kernels.hpp"
#include "graphgp/parallel.hpp"
#include "graphgp/rng.hpp"

#include <vector>

// GAT-GP layer steps. Attention is local: logits live on edges (a,i) with
// i in N_a, and the node kernel aggregates the logit covariance over neighbor
// pairs. Closed forms exist for identity attention (linear) and for ReLU logit
// nonlinearity with identity aggregation; the softmax variant only has the
// Monte-Carlo estimator.

namespace graphgp {

/// Linear-attention GAT step:
///   Sigma = sH^2 sw^4 sv^2 ( K .* (A K A^T) + A (K .* K) A^T ).
inline Matrix gat_step_linear(const Matrix& k, const Matrix& a, const HyperParams& hp) {
    if (a.rows() != k.rows() || a.cols() != k.rows())
        throw InvalidParameterError("kernel_engine.gat_step_linear", "adjacency/kernel shape mismatch");
    double c = hp.sigma_H2 * hp.sigma_w2 * hp.sigma_w2 * hp.sigma_v2;
    Matrix aka = a * k * a.transpose();
    Matrix kk = k.cwiseProduct(k);
    Matrix out = c * (k.cwiseProduct(aka) + a * kk * a.transpose());
    return symmetrized(out);
}

namespace detail {

inline std::vector<std::vector<int>> neighbor_lists(const Matrix& a) {
    std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) > 0.0) nbrs[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
    return nbrs;
}

} // namespace detail

/// ReLU-attention GAT step (identity aggregation): the closed-form double sum
/// over neighbor pairs with the arccos kernel of the logit correlation.
inline Matrix gat_step_relu_attention(const Matrix& k, const Matrix& a, const HyperParams& hp) {
    const char* where = "kernel_engine.gat_step_relu_attention";
    if (a.rows() != k.rows() || a.cols() != k.rows())
        throw InvalidParameterError(where, "adjacency/kernel shape mismatch");
    Eigen::Index n = k.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        if (k(i, i) <= 0.0)
            throw InvalidKernelError(where, "non-positive variance at node " + std::to_string(i));

    auto nbrs = detail::neighbor_lists(a);
    constexpr double pi = 3.141592653589793238462643383279502884;
    double pref = hp.sigma_H2 * hp.sigma_w2 * hp.sigma_w2 * hp.sigma_v2 / (2.0 * pi);

    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index bi = 0; bi < n; ++bi) {
        for (Eigen::Index ai = 0; ai <= bi; ++ai) {
            double acc = 0.0;
            for (int i : nbrs[static_cast<std::size_t>(ai)]) {
                double vai = k(ai, ai) + k(i, i);
                if (!(vai > 0.0))
                    throw DegenerateError(where, "degenerate edge variance at (" +
                                                     std::to_string(ai) + "," + std::to_string(i) + ")");
                for (int j : nbrs[static_cast<std::size_t>(bi)]) {
                    double vbj = k(bi, bi) + k(j, j);
                    if (!(vbj > 0.0))
                        throw DegenerateError(where, "degenerate edge variance at (" +
                                                         std::to_string(bi) + "," + std::to_string(j) + ")");
                    double scale = std::sqrt(vai * vbj);
                    double c = std::clamp((k(ai, bi) + k(i, j)) / scale, -1.0, 1.0);
                    double theta = std::acos(c);
                    acc += k(i, j) * scale * (std::sin(theta) + (pi - theta) * std::cos(theta));
                }
            }
            out(ai, bi) = pref * acc;
            out(bi, ai) = out(ai, bi);
        }
    }
    return out;
}

enum class AttentionNonlinearity { Identity, Relu };

/// Monte-Carlo kernel step estimate plus entrywise standard errors.
struct McKernelEstimate {
    Matrix value;
    Matrix standard_error;
    long long samples = 0;
};

/// Monte-Carlo GAT step: draws attention logits from their GP limit
/// E_ai = u_a + w_i with u, w independent GP(0, sw^2 sv^2 K) draws, applies
/// the logit nonlinearity and (optionally) the row softmax over each
/// neighborhood, and averages S K S^T across samples. The sample budget is
/// split into fixed blocks with per-block derived seeds; the reduction order
/// is block order, so results do not depend on the worker count.
inline McKernelEstimate gat_step_mc(const Matrix& k, const Matrix& a, const HyperParams& hp,
                                    AttentionNonlinearity attention, bool row_softmax,
                                    long long samples, std::uint64_t seed) {
    const char* where = "kernel_engine.gat_step_mc";
    if (a.rows() != k.rows() || a.cols() != k.rows())
        throw InvalidParameterError(where, "adjacency/kernel shape mismatch");
    if (samples < 1) throw InvalidParameterError(where, "samples must be >= 1");

    Eigen::Index n = k.rows();
    auto nbrs = detail::neighbor_lists(a);
    for (Eigen::Index i = 0; i < n; ++i)
        if (nbrs[static_cast<std::size_t>(i)].empty())
            throw DegenerateError(where, "node " + std::to_string(i) + " has empty neighborhood");

    Matrix logit_factor = psd_factor(hp.sigma_w2 * hp.sigma_v2 * k);

    constexpr long long block_size = 4096;
    std::size_t num_blocks = static_cast<std::size_t>((samples + block_size - 1) / block_size);
    std::vector<Matrix> block_sum(num_blocks), block_sumsq(num_blocks);

    parallel_for_blocks(num_blocks, [&](std::size_t b) {
        long long lo = static_cast<long long>(b) * block_size;
        long long hi = std::min(samples, lo + block_size);
        Rng rng(derive_seed(seed, "gat-mc-block", b));
        Matrix sum = Matrix::Zero(n, n);
        Matrix sumsq = Matrix::Zero(n, n);
        Matrix s = Matrix::Zero(n, n);
        for (long long t = lo; t < hi; ++t) {
            Vector u = logit_factor * rng.normal_vector(n);
            Vector w = logit_factor * rng.normal_vector(n);
            s.setZero();
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto& nb = nbrs[static_cast<std::size_t>(i)];
                if (row_softmax) {
                    double mx = -std::numeric_limits<double>::infinity();
                    for (int j : nb) {
                        double e = u(i) + w(j);
                        if (attention == AttentionNonlinearity::Relu) e = std::max(0.0, e);
                        s(i, j) = e;
                        mx = std::max(mx, e);
                    }
                    double z = 0.0;
                    for (int j : nb) {
                        s(i, j) = std::exp(s(i, j) - mx);
                        z += s(i, j);
                    }
                    for (int j : nb) s(i, j) /= z;
                } else {
                    for (int j : nb) {
                        double e = u(i) + w(j);
                        if (attention == AttentionNonlinearity::Relu) e = std::max(0.0, e);
                        s(i, j) = e;
                    }
                }
            }
            Matrix sks = s * k * s.transpose();
            sum += sks;
            sumsq += sks.cwiseProduct(sks);
        }
        block_sum[b] = std::move(sum);
        block_sumsq[b] = std::move(sumsq);
    });

    Matrix sum = Matrix::Zero(n, n), sumsq = Matrix::Zero(n, n);
    for (std::size_t b = 0; b < num_blocks; ++b) {
        sum += block_sum[b];
        sumsq += block_sumsq[b];
    }

    double inv_n = 1.0 / static_cast<double>(samples);
    Matrix mean = sum * inv_n;
    Matrix var = (sumsq * inv_n - mean.cwiseProduct(mean)).cwiseMax(0.0);
    double c = hp.sigma_H2 * hp.sigma_w2;

    McKernelEstimate est;
    est.value = symmetrized(c * mean);
    est.standard_error = c * (var * inv_n).cwiseSqrt();
    est.standard_error = symmetrized(est.standard_error);
    est.samples = samples;
    return est;
}

} // namespace graphgp

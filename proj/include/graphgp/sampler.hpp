#pragma once

#include "graphgp/gat.hpp"
#include "graphgp/graph.hpp"
#include "graphgp/graphormer.hpp"
#include "graphgp/parallel.hpp"
#include "graphgp/rng.hpp"
#include "graphgp/specformer.hpp"

#include <algorithm>
#include <string>
#include <vector>

// Finite-width, finite-head forward-pass samplers at random initialization,
// and the moment machinery that quantifies convergence to the analytic GP.
//
// The samplers draw the per-head feature projections directly through the
// Gram factor of the input kernel (the network consumes weights only through
// those products, so the output distribution is exactly that of the finite
// net), and the final shared projection is integrated out conditionally: given
// the concatenated head outputs Z, one output coordinate is N(0, c Z Z^T),
// which is sampled through an n x n factor instead of materializing the
// (heads * width)-sized projection. Per-head weight streams depend only on
// (seed, sample, head slot), so enlarging width or head count refines the same
// underlying draws.

namespace graphgp {

struct SamplerConfig {
    int width = 8;
    int heads = 8;
    long long samples = 2;
    std::uint64_t seed = 0;
    ModelTag model = ModelTag::GAT;
    HyperParams hp;

    // Optional head-slot permutation (exchangeability checks).
    std::vector<int> head_seed_permutation;
    // Specformer: graph-convolution head count; 0 means `heads`.
    int specformer_conv_heads = 0;

    void validate() const {
        if (width < 1 || heads < 1)
            throw InvalidParameterError("finite_width_sampler.SamplerConfig",
                                        "width and heads must be >= 1");
        if (samples < 2)
            throw InvalidParameterError("finite_width_sampler.SamplerConfig", "samples must be >= 2");
        if (!head_seed_permutation.empty()) {
            if (static_cast<int>(head_seed_permutation.size()) != heads)
                throw InvalidParameterError("finite_width_sampler.SamplerConfig",
                                            "head permutation size must equal heads");
            std::vector<bool> seen(static_cast<std::size_t>(heads), false);
            for (int v : head_seed_permutation) {
                if (v < 0 || v >= heads || seen[static_cast<std::size_t>(v)])
                    throw InvalidParameterError("finite_width_sampler.SamplerConfig",
                                                "head permutation must be a permutation of [0, heads)");
                seen[static_cast<std::size_t>(v)] = true;
            }
        }
        hp.validate();
    }

    int head_slot(int h) const {
        return head_seed_permutation.empty() ? h : head_seed_permutation[static_cast<std::size_t>(h)];
    }
};

// ============================================================================
// Empirical moments
// ============================================================================

struct Histogram {
    std::vector<double> edges;     // bins + 1 entries
    std::vector<long long> counts; // counts sum to the sample count
};

struct EmpiricalMoments {
    Vector mean;
    Matrix covariance;       // sample covariance (N-1 denominator)
    Vector skewness;
    Vector excess_kurtosis;
    std::vector<Histogram> histograms; // one per node
    long long samples = 0;
};

namespace detail {

/// Freedman-Diaconis bin edges; degenerate spreads collapse to a single bin.
inline Histogram make_histogram(std::vector<double> values) {
    Histogram h;
    long long n = static_cast<long long>(values.size());
    std::sort(values.begin(), values.end());
    double lo = values.front(), hi = values.back();
    double iqr = values[static_cast<std::size_t>(3 * (n - 1) / 4)] -
                 values[static_cast<std::size_t>((n - 1) / 4)];
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
    int bins = 1;
    if (width > 0.0 && hi > lo)
        bins = std::clamp(static_cast<int>(std::ceil((hi - lo) / width)), 1, 512);
    if (hi == lo) hi = lo + 1.0;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        h.edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

} // namespace detail

/// Moments of a (samples x n) output matrix.
inline EmpiricalMoments compute_empirical_moments(const Matrix& outputs) {
    long long n_samples = outputs.rows();
    Eigen::Index n = outputs.cols();
    if (n_samples < 2)
        throw InvalidParameterError("finite_width_sampler.compute_empirical_moments",
                                    "need at least 2 samples");
    EmpiricalMoments m;
    m.samples = n_samples;
    m.mean = outputs.colwise().mean();
    Matrix centered = outputs.rowwise() - m.mean.transpose();
    m.covariance = centered.transpose() * centered / static_cast<double>(n_samples - 1);

    m.skewness.resize(n);
    m.excess_kurtosis.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double m2 = centered.col(j).squaredNorm() / static_cast<double>(n_samples);
        double m3 = centered.col(j).array().cube().sum() / static_cast<double>(n_samples);
        double m4 = centered.col(j).array().square().square().sum() / static_cast<double>(n_samples);
        m.skewness(j) = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
        m.excess_kurtosis(j) = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    }

    m.histograms.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        std::vector<double> col(static_cast<std::size_t>(n_samples));
        for (long long s = 0; s < n_samples; ++s)
            col[static_cast<std::size_t>(s)] = outputs(s, j);
        m.histograms.push_back(detail::make_histogram(std::move(col)));
    }
    return m;
}

namespace detail {

/// Runs fn(sample_index, row) over all samples in deterministic blocks; each
/// sample owns one row of the returned (samples x n) matrix.
template <typename Fn>
Matrix collect_samples(long long samples, Eigen::Index n, Fn&& fn) {
    Matrix out(samples, n);
    constexpr long long block = 64;
    std::size_t blocks = static_cast<std::size_t>((samples + block - 1) / block);
    parallel_for_blocks(blocks, [&](std::size_t b) {
        long long lo = static_cast<long long>(b) * block;
        long long hi = std::min(samples, lo + block);
        for (long long s = lo; s < hi; ++s) {
            Vector row = fn(s);
            out.row(s) = row.transpose();
        }
    });
    return out;
}

} // namespace detail

// ============================================================================
// GAT layer sampler
// ============================================================================

enum class SamplerAttention { Softmax, Identity };

inline std::vector<std::vector<int>> sampler_neighbor_lists(const Graph& g,
                                                            SamplerAttention attention,
                                                            const char* where) {
    auto nbrs = detail::neighbor_lists(g.adjacency);
    if (attention == SamplerAttention::Softmax)
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            if (nbrs[a].empty())
                throw DegenerateError(where, "node " + std::to_string(a) +
                                                 " has zero degree under softmax attention");
    return nbrs;
}

/// One GAT layer at finite (width, heads): per sample draws all weights from
/// the priors, computes the pre-activation output for one output coordinate at
/// every node, and accumulates moments. `attention` picks softmax vs identity
/// aggregation; `activation_sigma` is the logit nonlinearity inside the
/// attention scores.
inline EmpiricalMoments sample_gat_layer(const Graph& g, const SamplerConfig& cfg,
                                         SamplerAttention attention,
                                         AttentionNonlinearity activation_sigma) {
    const char* where = "finite_width_sampler.sample_gat_layer";
    cfg.validate();
    if (!g.has_features()) throw InvalidParameterError(where, "graph needs features");

    auto nbrs = sampler_neighbor_lists(g, attention, where);
    Eigen::Index n = g.n;
    int w = cfg.width, heads = cfg.heads;
    const HyperParams& hp = cfg.hp;

    Matrix k0 = g.features * g.features.transpose() / static_cast<double>(g.features.cols());
    Matrix feat_factor = psd_factor(hp.sigma_w2 * k0);
    double v_std = std::sqrt(hp.sigma_v2 / static_cast<double>(w));

    Matrix outputs = detail::collect_samples(cfg.samples, n, [&](long long s) {
        std::uint64_t sample_seed = derive_seed(cfg.seed, "gat-sample", static_cast<std::uint64_t>(s));
        Matrix m = Matrix::Zero(n, n);
        Matrix sattn = Matrix::Zero(n, n);
        for (int h = 0; h < heads; ++h) {
            std::uint64_t head_seed =
                derive_seed(sample_seed, "head", static_cast<std::uint64_t>(cfg.head_slot(h)));
            Rng rng_y(derive_seed(head_seed, "proj"));
            Rng rng_v(derive_seed(head_seed, "attn"));

            // Y = X W^T drawn through the Gram factor; columns iid N(0, sw^2 K0).
            Matrix y = feat_factor * rng_y.normal_matrix(n, w);
            // Attention vector halves drawn interleaved so width extensions
            // refine the same stream.
            Vector v1(w), v2(w);
            for (int c = 0; c < w; ++c) {
                v1(c) = v_std * rng_v.normal();
                v2(c) = v_std * rng_v.normal();
            }
            Vector u = y * v1;
            Vector t = y * v2;

            sattn.setZero();
            for (Eigen::Index a = 0; a < n; ++a) {
                const auto& nb = nbrs[static_cast<std::size_t>(a)];
                if (attention == SamplerAttention::Softmax) {
                    double mx = -std::numeric_limits<double>::infinity();
                    for (int i : nb) {
                        double e = u(a) + t(i);
                        if (activation_sigma == AttentionNonlinearity::Relu) e = std::max(0.0, e);
                        sattn(a, i) = e;
                        mx = std::max(mx, e);
                    }
                    double z = 0.0;
                    for (int i : nb) {
                        sattn(a, i) = std::exp(sattn(a, i) - mx);
                        z += sattn(a, i);
                    }
                    for (int i : nb) sattn(a, i) /= z;
                } else {
                    for (int i : nb) {
                        double e = u(a) + t(i);
                        if (activation_sigma == AttentionNonlinearity::Relu) e = std::max(0.0, e);
                        sattn(a, i) = e;
                    }
                }
            }
            Matrix b = sattn * y;
            m.noalias() += b * b.transpose();
        }
        Matrix cov = (hp.sigma_H2 / (static_cast<double>(heads) * w)) * m;
        Rng rng_out(derive_seed(sample_seed, "out"));
        return Vector(psd_factor(cov) * rng_out.normal_vector(n));
    });
    return compute_empirical_moments(outputs);
}

// ============================================================================
// Graphormer layer sampler
// ============================================================================

/// One Graphormer layer: full-graph attention over augmented features whose
/// Gram equals alpha K0 + (1-alpha) R (positional vectors enter only through
/// inner products), additive per-bucket structural bias, softmax or identity
/// aggregation.
inline EmpiricalMoments sample_graphormer_layer(const Graph& g, const SamplerConfig& cfg,
                                                const PositionalCovariance& pe,
                                                const StructuralRelation& relation,
                                                SamplerAttention attention) {
    const char* where = "finite_width_sampler.sample_graphormer_layer";
    cfg.validate();
    if (!g.has_features()) throw InvalidParameterError(where, "graph needs features");
    if (relation.relation.rows() != g.n)
        throw InvalidParameterError(where, "relation/graph size mismatch");

    Eigen::Index n = g.n;
    int w = cfg.width, heads = cfg.heads;
    const HyperParams& hp = cfg.hp;

    Matrix k0 = g.features * g.features.transpose() / static_cast<double>(g.features.cols());
    Matrix ktilde = graphormer_augment(k0, pe.R, hp);
    Matrix fq = psd_factor(hp.sigma_Q2 * ktilde);
    Matrix fk = psd_factor(hp.sigma_K2 * ktilde);
    Matrix fv = psd_factor(hp.sigma_w2 * ktilde);

    int max_bucket = relation.relation.maxCoeff();
    double inv_sqrt_w = 1.0 / std::sqrt(static_cast<double>(w));
    double sb = std::sqrt(hp.sigma_b2);

    Matrix outputs = detail::collect_samples(cfg.samples, n, [&](long long s) {
        std::uint64_t sample_seed =
            derive_seed(cfg.seed, "graphormer-sample", static_cast<std::uint64_t>(s));
        Matrix m = Matrix::Zero(n, n);
        for (int h = 0; h < heads; ++h) {
            std::uint64_t head_seed =
                derive_seed(sample_seed, "head", static_cast<std::uint64_t>(cfg.head_slot(h)));
            Rng rng(derive_seed(head_seed, "proj"));
            Matrix q = fq * rng.normal_matrix(n, w);
            Matrix kk = fk * rng.normal_matrix(n, w);
            Matrix v = fv * rng.normal_matrix(n, w);

            Rng rng_bias(derive_seed(head_seed, "bias"));
            std::vector<double> bucket_bias(static_cast<std::size_t>(max_bucket) + 1);
            for (auto& b : bucket_bias) b = sb * rng_bias.normal();

            Matrix e = q * kk.transpose() * inv_sqrt_w;
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    e(i, j) += bucket_bias[static_cast<std::size_t>(relation.relation(i, j))];

            if (attention == SamplerAttention::Softmax) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    double mx = e.row(i).maxCoeff();
                    Eigen::ArrayXd ex = (e.row(i).array() - mx).exp();
                    e.row(i) = ex / ex.sum();
                }
            }
            Matrix b = e * v;
            m.noalias() += b * b.transpose();
        }
        Matrix cov = (hp.sigma_H2 / (static_cast<double>(heads) * w)) * m;
        Rng rng_out(derive_seed(sample_seed, "out"));
        return Vector(psd_factor(cov) * rng_out.normal_vector(n));
    });
    return compute_empirical_moments(outputs);
}

// ============================================================================
// Specformer stack sampler
// ============================================================================

struct SpecformerSample {
    EmpiricalMoments node_moments;    // one output coordinate per node
    EmpiricalMoments lambda_moments;  // learned filter values (first conv head)
};

/// Samples the full Specformer stack: per graph-convolution head an
/// independent eigenvalue-encoding attention stack of `token_layers`, the
/// decoded filter lambda-bar, the spectral operator U diag(lambda) U^T applied
/// to the feature value path. Also accumulates lambda-bar moments for
/// comparison with the analytic filter kernel.
inline SpecformerSample sample_specformer_stack(const Graph& g, const SamplerConfig& cfg,
                                                int token_layers, int token_embed_dim,
                                                double epsilon, DecoderNonlinearity decoder,
                                                SamplerAttention token_phi) {
    const char* where = "finite_width_sampler.sample_specformer_stack";
    cfg.validate();
    if (!g.has_features()) throw InvalidParameterError(where, "graph needs features");
    if (token_layers < 1) throw InvalidParameterError(where, "token_layers must be >= 1");

    Eigen::Index n = g.n;
    int w = cfg.width;
    int token_heads = cfg.heads;
    int conv_heads = cfg.specformer_conv_heads > 0 ? cfg.specformer_conv_heads : cfg.heads;
    const HyperParams& hp = cfg.hp;

    SpectralDecomposition spec = normalized_laplacian_spectrum(g);
    Matrix h0 = specformer_token_features(spec, token_embed_dim, epsilon);
    Matrix k0 = g.features * g.features.transpose() / static_cast<double>(g.features.cols());
    Matrix node_value_factor = psd_factor(hp.sigma_w2 * k0);
    double inv_sqrt_w = 1.0 / std::sqrt(static_cast<double>(w));

    Matrix node_out(cfg.samples, n);
    Matrix lambda_out(cfg.samples, n);

    constexpr long long block = 16;
    std::size_t blocks = static_cast<std::size_t>((cfg.samples + block - 1) / block);
    parallel_for_blocks(blocks, [&](std::size_t blk) {
        long long lo = static_cast<long long>(blk) * block;
        long long hi = std::min(cfg.samples, lo + block);
        for (long long s = lo; s < hi; ++s) {
            std::uint64_t sample_seed =
                derive_seed(cfg.seed, "specformer-sample", static_cast<std::uint64_t>(s));
            Matrix m = Matrix::Zero(n, n);
            for (int ch = 0; ch < conv_heads; ++ch) {
                std::uint64_t conv_seed =
                    derive_seed(sample_seed, "conv-head", static_cast<std::uint64_t>(ch));
                // token stack
                Matrix h = h0;
                for (int t = 0; t < token_layers; ++t) {
                    double width_prev = static_cast<double>(h.cols());
                    Matrix gram_factor = psd_factor(h * h.transpose() / width_prev);
                    Matrix acc = Matrix::Zero(n, n);
                    for (int k = 0; k < token_heads; ++k) {
                        std::uint64_t tok_seed = derive_seed(
                            conv_seed, "token",
                            static_cast<std::uint64_t>(t) * 1000003ULL +
                                static_cast<std::uint64_t>(cfg.head_slot(k)));
                        Rng rng(tok_seed);
                        Matrix q = std::sqrt(hp.sigma_Q2) * (gram_factor * rng.normal_matrix(n, w));
                        Matrix kk = std::sqrt(hp.sigma_K2) * (gram_factor * rng.normal_matrix(n, w));
                        Matrix v = std::sqrt(hp.sigma_V2) * (gram_factor * rng.normal_matrix(n, w));
                        Matrix e = q * kk.transpose() * inv_sqrt_w;
                        if (token_phi == SamplerAttention::Softmax) {
                            for (Eigen::Index i = 0; i < n; ++i) {
                                double mx = e.row(i).maxCoeff();
                                Eigen::ArrayXd ex = (e.row(i).array() - mx).exp();
                                e.row(i) = ex / ex.sum();
                            }
                        }
                        Matrix b = e * v;
                        acc.noalias() += b * b.transpose();
                    }
                    Rng rng_agg(derive_seed(conv_seed, "token-agg", static_cast<std::uint64_t>(t)));
                    Matrix cov = (hp.sigma_O2 / (static_cast<double>(token_heads) * w)) * acc;
                    h = psd_factor(cov) * rng_agg.normal_matrix(n, w);
                }
                // decode lambda-bar
                Rng rng_dec(derive_seed(conv_seed, "decode"));
                Matrix lam_cov = hp.sigma_lambda2 * (h * h.transpose() / static_cast<double>(w));
                Vector lambda = psd_factor(lam_cov) * rng_dec.normal_vector(n);
                if (decoder == DecoderNonlinearity::Relu) lambda = lambda.cwiseMax(0.0);
                if (ch == 0) lambda_out.row(s) = lambda.transpose();

                Matrix sconv =
                    spec.eigenvectors * lambda.asDiagonal() * spec.eigenvectors.transpose();
                Rng rng_val(derive_seed(conv_seed, "value"));
                Matrix v = node_value_factor * rng_val.normal_matrix(n, w);
                Matrix b = sconv * v;
                m.noalias() += b * b.transpose();
            }
            Matrix cov = (hp.sigma_H2 / (static_cast<double>(conv_heads) * w)) * m;
            Rng rng_out(derive_seed(sample_seed, "out"));
            node_out.row(s) = (psd_factor(cov) * rng_out.normal_vector(n)).transpose();
        }
    });

    SpecformerSample result;
    result.node_moments = compute_empirical_moments(node_out);
    result.lambda_moments = compute_empirical_moments(lambda_out);
    return result;
}

// ============================================================================
// Gaussianity report
// ============================================================================

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

struct GaussianityReport {
    double rel_frobenius_error = 0.0;
    double max_abs_skewness = 0.0;
    double max_abs_excess_kurtosis = 0.0;
    Vector ks_statistics; // per node, against N(0, Sigma_aa)

    std::string to_text() const;
};

/// Compares empirical moments with the analytic kernel: relative Frobenius
/// error of the covariance, worst skewness/kurtosis, and per-node KS
/// statistics (histogram-edge evaluated) against N(0, Sigma_aa).
inline GaussianityReport gaussianity_report(const EmpiricalMoments& m, const Matrix& analytic) {
    const char* where = "finite_width_sampler.gaussianity_report";
    if (analytic.rows() != m.covariance.rows() || analytic.cols() != m.covariance.cols())
        throw InvalidParameterError(where, "moment/kernel dimension mismatch");

    GaussianityReport report;
    report.rel_frobenius_error = relative_frobenius_error(m.covariance, analytic);
    report.max_abs_skewness = m.skewness.cwiseAbs().maxCoeff();
    report.max_abs_excess_kurtosis = m.excess_kurtosis.cwiseAbs().maxCoeff();

    Eigen::Index n = analytic.rows();
    report.ks_statistics.resize(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const Histogram& h = m.histograms[static_cast<std::size_t>(a)];
        double sd = std::sqrt(std::max(analytic(a, a), 1e-300));
        double total = 0.0;
        for (long long c : h.counts) total += static_cast<double>(c);
        double d = normal_cdf(h.edges.front() / sd);
        double cum = 0.0;
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            cum += static_cast<double>(h.counts[b]);
            double edge = h.edges[b + 1];
            d = std::max(d, std::abs(cum / total - normal_cdf(edge / sd)));
        }
        report.ks_statistics(a) = d;
    }
    return report;
}

inline std::string GaussianityReport::to_text() const {
    std::string out;
    out += "rel_frobenius_error = " + std::to_string(rel_frobenius_error) + "\n";
    out += "max_abs_skewness = " + std::to_string(max_abs_skewness) + "\n";
    out += "max_abs_excess_kurtosis = " + std::to_string(max_abs_excess_kurtosis) + "\n";
    for (Eigen::Index a = 0; a < ks_statistics.size(); ++a)
        out += "ks_node_" + std::to_string(a) + " = " + std::to_string(ks_statistics(a)) + "\n";
    return out;
}

} // namespace graphgp

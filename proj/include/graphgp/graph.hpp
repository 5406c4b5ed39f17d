#pragma once

#include "graphgp/common.hpp"
#include "graphgp/rng.hpp"

#include <deque>
#include <optional>
#include <vector>

// Graph construction and spectral preprocessing: population / sampled
// stochastic block models, the normalized adjacency and Laplacian spectrum,
// and shortest-path relation buckets. Everything is dense (desk scale) and
// immutable after construction.

namespace graphgp {

// ============================================================================
// Domain types
// ============================================================================

/// Undirected graph: symmetric nonnegative adjacency, optional node features
/// (rows) and class labels.
struct Graph {
    int n = 0;
    Matrix adjacency;             // n x n, symmetric, entries >= 0
    Matrix features;              // n x d_in (0 x 0 when absent)
    std::optional<IntVector> labels;

    bool has_features() const { return features.rows() == n && features.cols() > 0; }

    /// Degrees as adjacency row sums (weighted).
    Vector degrees() const { return adjacency.rowwise().sum(); }

    void check_invariants() const {
        if (adjacency.rows() != n || adjacency.cols() != n)
            throw InvalidParameterError("graph_core.Graph", "adjacency must be n x n");
        if (!is_symmetric(adjacency, 1e-12))
            throw InvalidParameterError("graph_core.Graph", "adjacency must be symmetric within 1e-12");
        if (adjacency.minCoeff() < 0.0)
            throw InvalidParameterError("graph_core.Graph", "adjacency entries must be nonnegative");
        if (features.size() > 0 && features.rows() != n)
            throw InvalidParameterError("graph_core.Graph", "feature row count must equal n");
        if (labels && labels->size() != n)
            throw InvalidParameterError("graph_core.Graph", "label count must equal n");
    }
};

/// Eigendecomposition of a symmetric matrix (by default the normalized
/// Laplacian): eigenvalues ascending, eigenvectors in columns of U.
struct SpectralDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;

    Matrix reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
    }
};

/// Two-community stochastic block model parameters plus the block-constant
/// kernel initialization scalars.
struct SbmParams {
    int n = 0;        // even
    double p = 0.0;   // intra-community edge probability
    double q = 0.0;   // inter-community edge probability
    double x0 = 1.0;  // initial intra-community kernel value
    double y0 = 0.0;  // initial inter-community kernel value

    void validate() const {
        if (n <= 0 || n % 2 != 0)
            throw InvalidParameterError("graph_core.SbmParams", "n must be positive and even");
        if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
            throw InvalidParameterError("graph_core.SbmParams", "p and q must lie in [0, 1]");
        if (!(x0 > std::abs(y0)))
            throw InvalidParameterError("graph_core.SbmParams",
                                        "need x0 > |y0| >= 0 so the initial kernel is PSD");
    }
};

/// Pairwise structural relation buckets (shortest-path distance, truncated).
struct StructuralRelation {
    IntMatrix relation; // symmetric, diagonal 0, unreachable = sentinel bucket
    int max_bucket = 0;

    int sentinel() const { return max_bucket + 1; }
};

// ============================================================================
// Generators
// ============================================================================

/// Expected adjacency of the 2-block SBM: p on the within-community blocks
/// (diagonal included) and q across. No features attached.
inline Graph population_sbm(const SbmParams& params) {
    params.validate();
    int half = params.n / 2;
    Graph g;
    g.n = params.n;
    g.adjacency = Matrix::Constant(params.n, params.n, params.q);
    g.adjacency.topLeftCorner(half, half).setConstant(params.p);
    g.adjacency.bottomRightCorner(half, half).setConstant(params.p);
    IntVector labels(params.n);
    labels.head(half).setZero();
    labels.tail(half).setOnes();
    g.labels = labels;
    g.check_invariants();
    return g;
}

/// Block-constant matrix with value x within communities (diagonal included)
/// and y across; the theory-mode kernel initialization.
inline Matrix block_kernel(int n, double x, double y) {
    if (n <= 0 || n % 2 != 0)
        throw InvalidParameterError("graph_core.block_kernel", "n must be positive and even");
    int half = n / 2;
    Matrix k = Matrix::Constant(n, n, y);
    k.topLeftCorner(half, half).setConstant(x);
    k.bottomRightCorner(half, half).setConstant(x);
    return k;
}

/// Samples a contextual SBM: Bernoulli edges (simple graph, zero diagonal),
/// class-conditional Gaussian features with means +/- mean_separation * mu for
/// a fixed random unit direction mu, labels = community ids.
/// mean_separation = 0 gives the uninformative "random features" regime.
inline Graph sample_csbm(const SbmParams& params, int feature_dim, double mean_separation,
                         std::uint64_t seed) {
    params.validate();
    if (feature_dim < 1)
        throw InvalidParameterError("graph_core.sample_csbm", "feature_dim must be >= 1");

    int n = params.n;
    int half = n / 2;
    Graph g;
    g.n = n;
    g.adjacency = Matrix::Zero(n, n);

    Rng edge_rng(derive_seed(seed, "csbm-edges"));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double prob = ((i < half) == (j < half)) ? params.p : params.q;
            if (edge_rng.uniform() < prob) {
                g.adjacency(i, j) = 1.0;
                g.adjacency(j, i) = 1.0;
            }
        }
    }

    Rng feat_rng(derive_seed(seed, "csbm-features"));
    Vector direction = feat_rng.normal_vector(feature_dim);
    double norm = direction.norm();
    if (norm == 0.0) direction(0) = 1.0; else direction /= norm;

    g.features = feat_rng.normal_matrix(n, feature_dim);
    for (int i = 0; i < n; ++i) {
        double s = (i < half) ? mean_separation : -mean_separation;
        g.features.row(i) += s * direction.transpose();
    }

    IntVector labels(n);
    labels.head(half).setZero();
    labels.tail(half).setOnes();
    g.labels = labels;
    g.check_invariants();
    return g;
}

/// Optionally add unit self-loops before normalization (the benchmark
/// convention is undocumented; default elsewhere is no self-loops).
inline Graph with_self_loops(Graph g) {
    g.adjacency.diagonal().array() += 1.0;
    return g;
}

// ============================================================================
// Spectral preprocessing
// ============================================================================

/// D^{-1/2} A D^{-1/2}. Isolated nodes are an error: every kernel formula
/// downstream divides by degree.
inline Matrix normalized_adjacency(const Graph& g) {
    Vector deg = g.degrees();
    for (int i = 0; i < g.n; ++i)
        if (!(deg(i) > 0.0))
            throw DegenerateError("graph_core.normalized_adjacency",
                                  "node " + std::to_string(i) + " has zero degree");
    Vector dinv = deg.cwiseSqrt().cwiseInverse();
    Matrix s = dinv.asDiagonal() * g.adjacency * dinv.asDiagonal();
    return symmetrized(s);
}

/// Spectrum of the normalized Laplacian L = I - D^{-1/2} A D^{-1/2};
/// eigenvalues ascending in [0, 2] up to roundoff.
inline SpectralDecomposition normalized_laplacian_spectrum(const Graph& g) {
    Matrix l = Matrix::Identity(g.n, g.n) - normalized_adjacency(g);
    Eigen::SelfAdjointEigenSolver<Matrix> es(l);
    if (es.info() != Eigen::Success) {
        double scale = l.cwiseAbs().maxCoeff();
        throw NumericalError("graph_core.normalized_laplacian_spectrum",
                             "eigensolver failed to converge (n=" + std::to_string(g.n) +
                                 ", max |L_ij|=" + std::to_string(scale) + ")");
    }
    SpectralDecomposition spec{es.eigenvalues(), es.eigenvectors()};
    if (spec.eigenvalues(0) < -1e-8 || spec.eigenvalues(g.n - 1) > 2.0 + 1e-8)
        throw NumericalError("graph_core.normalized_laplacian_spectrum",
                             "eigenvalues escape [0, 2] beyond tolerance");
    return spec;
}

// ============================================================================
// Structural descriptors
// ============================================================================

/// BFS shortest-path distances bucketed at max_bucket; unreachable pairs get
/// the sentinel bucket max_bucket + 1. Any positive adjacency entry is an edge.
inline StructuralRelation shortest_path_buckets(const Graph& g, int max_bucket) {
    if (max_bucket < 0)
        throw InvalidParameterError("graph_core.shortest_path_buckets", "max_bucket must be >= 0");
    int n = g.n;
    StructuralRelation rel;
    rel.max_bucket = max_bucket;
    rel.relation = IntMatrix::Constant(n, n, max_bucket + 1);

    std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && g.adjacency(i, j) > 0.0) nbrs[static_cast<std::size_t>(i)].push_back(j);

    std::vector<int> dist(static_cast<std::size_t>(n));
    for (int src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[static_cast<std::size_t>(src)] = 0;
        std::deque<int> queue{src};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : nbrs[static_cast<std::size_t>(u)]) {
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (int j = 0; j < n; ++j) {
            int d = dist[static_cast<std::size_t>(j)];
            rel.relation(src, j) = d < 0 ? max_bucket + 1 : std::min(d, max_bucket);
        }
    }
    return rel;
}

} // namespace graphgp

#pragma once

#include "graphgp/graph.hpp"
#include "graphgp/kernels.hpp"
#include "graphgp/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

// Shared random-instance builders for the oracle tests.

namespace test_helpers {

using graphgp::Matrix;
using graphgp::Vector;

/// Random PSD kernel with strictly positive diagonal (G G^T + eps I).
inline Matrix random_psd(graphgp::Rng& rng, int n, double diag_boost = 0.1) {
    Matrix g = rng.normal_matrix(n, n + 2);
    Matrix k = g * g.transpose() / static_cast<double>(n + 2);
    k.diagonal().array() += diag_boost;
    return graphgp::symmetrized(k);
}

/// Random symmetric 0/1 adjacency; every node gets at least one neighbor.
inline Matrix random_adjacency(graphgp::Rng& rng, int n, double density = 0.5,
                               bool self_loops = false) {
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < density) a(i, j) = a(j, i) = 1.0;
    if (self_loops) a.diagonal().setOnes();
    for (int i = 0; i < n; ++i) {
        if (a.row(i).sum() == 0.0) {
            int j = (i + 1) % n;
            a(i, j) = a(j, i) = 1.0;
        }
    }
    return a;
}

/// Random orthonormal basis via QR of a Gaussian matrix.
inline Matrix random_orthonormal(graphgp::Rng& rng, int n) {
    Matrix g = rng.normal_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(n, n);
}

/// Random hyperparameters in [0.5, 1.5] so prefactors are exercised.
inline graphgp::HyperParams random_hyperparams(graphgp::Rng& rng) {
    graphgp::HyperParams hp;
    hp.sigma_w2 = 0.5 + rng.uniform();
    hp.sigma_v2 = 0.5 + rng.uniform();
    hp.sigma_H2 = 0.5 + rng.uniform();
    hp.sigma_Q2 = 0.5 + rng.uniform();
    hp.sigma_K2 = 0.5 + rng.uniform();
    hp.sigma_b2 = 0.5 + rng.uniform();
    hp.sigma_V2 = 0.5 + rng.uniform();
    hp.sigma_O2 = 0.5 + rng.uniform();
    hp.sigma_lambda2 = 0.5 + rng.uniform();
    hp.alpha = rng.uniform();
    return hp;
}

/// Extracts the (x, y) block scalars of a block-constant matrix, asserting
/// block constancy within tol.
inline std::pair<double, double> block_scalars(const Matrix& k, double tol = 1e-10) {
    int n = static_cast<int>(k.rows());
    int half = n / 2;
    double x = k(0, 0), y = k(0, half);
    double scale = std::max({std::abs(x), std::abs(y), 1e-30});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double expected = ((i < half) == (j < half)) ? x : y;
            REQUIRE(std::abs(k(i, j) - expected) <= tol * scale);
        }
    return {x, y};
}

} // namespace test_helpers

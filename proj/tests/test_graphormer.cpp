#include "graphgp/graphormer.hpp"

#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace graphgp;
using Catch::Matchers::WithinAbs;

namespace {

/// Literal quadruple-loop evaluation of the linear Graphormer kernel.
Matrix graphormer_oracle(const Matrix& kt, const IntMatrix& rel, const HyperParams& hp) {
    int n = static_cast<int>(kt.rows());
    double z = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z += kt(i, j) * kt(i, j);
    Matrix out(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double bias = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (rel(a, i) == rel(b, j)) bias += kt(i, j);
            out(a, b) = hp.sigma_H2 * hp.sigma_w2 *
                        (hp.sigma_Q2 * hp.sigma_K2 * kt(a, b) * z + hp.sigma_b2 * bias);
        }
    return out;
}

} // namespace

TEST_CASE("graphormer_augment") {
    Rng rng(51);
    Matrix k = test_helpers::random_psd(rng, 5);
    Matrix r = test_helpers::random_psd(rng, 5);
    HyperParams hp;
    hp.alpha = 1.0;
    REQUIRE(graphormer_augment(k, r, hp) == k);
    hp.alpha = 0.0;
    REQUIRE(graphormer_augment(k, r, hp) == r);
    hp.alpha = 0.5;
    Matrix i5 = Matrix::Identity(5, 5);
    REQUIRE(graphormer_augment(i5, i5, hp).isApprox(i5, 1e-15));
}

TEST_CASE("graphormer_step_linear") {
    Rng rng(52);
    SECTION("zero bias makes the output a scalar multiple of Ktilde") {
        Matrix kt = test_helpers::random_psd(rng, 5);
        HyperParams hp = test_helpers::random_hyperparams(rng);
        hp.sigma_b2 = 0.0;
        Matrix out = graphormer_step_linear(kt, nullptr, hp);
        double z = hp.sigma_H2 * hp.sigma_w2 * hp.sigma_Q2 * hp.sigma_K2 *
                   kt.cwiseProduct(kt).sum();
        REQUIRE(relative_frobenius_error(out, z * kt) < 1e-13);
    }
    SECTION("all nodes in one bucket gives a constant bias term") {
        Matrix kt = test_helpers::random_psd(rng, 4);
        StructuralRelation rel;
        rel.max_bucket = 2;
        rel.relation = IntMatrix::Zero(4, 4);
        HyperParams hp;
        hp.sigma_Q2 = 0.0; // isolate the bias term
        hp.sigma_b2 = 1.4;
        Matrix out = graphormer_step_linear(kt, &rel, hp);
        double expected = hp.sigma_b2 * kt.sum();
        REQUIRE(relative_frobenius_error(out, Matrix::Constant(4, 4, expected)) < 1e-13);
    }
    SECTION("matches the quadruple-loop oracle with bias") {
        for (int trial = 0; trial < 25; ++trial) {
            int n = 3 + static_cast<int>(rng.bits() % 4);
            Matrix kt = test_helpers::random_psd(rng, n);
            StructuralRelation rel;
            rel.max_bucket = 3;
            rel.relation = IntMatrix::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    int b = i == j ? 0 : 1 + static_cast<int>(rng.bits() % 3);
                    rel.relation(i, j) = rel.relation(j, i) = b;
                }
            HyperParams hp = test_helpers::random_hyperparams(rng);
            Matrix fast = graphormer_step_linear(kt, &rel, hp);
            Matrix slow = graphormer_oracle(kt, rel.relation, hp);
            REQUIRE(relative_frobenius_error(fast, slow) < 1e-12);
        }
    }
    SECTION("sigma_b2 > 0 without a relation is an error") {
        Matrix kt = Matrix::Identity(3, 3);
        HyperParams hp;
        hp.sigma_b2 = 1.0;
        REQUIRE_THROWS_AS(graphormer_step_linear(kt, nullptr, hp), InvalidParameterError);
    }
    SECTION("block-constancy preservation") {
        Matrix kt = block_kernel(6, 1.0, 0.3);
        HyperParams hp;
        hp.sigma_b2 = 0.0;
        Matrix out = graphormer_step_linear(kt, nullptr, hp);
        test_helpers::block_scalars(out, 1e-10);
    }
}

TEST_CASE("build_positional_covariance") {
    SbmParams params{8, 0.8, 0.3, 1.0, 0.0};
    Graph g = population_sbm(params);
    HyperParams hp;
    hp.sigma_CE2 = 1.9;

    SECTION("full-rank Laplacian eigenvectors give the identity") {
        PositionalCovariance pe = build_positional_covariance(g, PeKind::LaplacianEigvec, g.n, hp);
        REQUIRE(relative_frobenius_error(pe.R, Matrix::Identity(g.n, g.n)) < 1e-10);
        REQUIRE_NOTHROW(pe.check_invariants());
    }
    SECTION("full-rank spectral reconstruction recovers L") {
        PositionalCovariance pe =
            build_positional_covariance(g, PeKind::SpectralReconstruction, g.n, hp);
        Matrix l = Matrix::Identity(g.n, g.n) - normalized_adjacency(g);
        REQUIRE((pe.R - l).norm() < 1e-8);
    }
    SECTION("regular graph centrality is constant sigma_CE^2") {
        PositionalCovariance pe = build_positional_covariance(g, PeKind::Centrality, 0, hp);
        REQUIRE(pe.R == Matrix::Constant(g.n, g.n, hp.sigma_CE2));
    }
    SECTION("centrality takes values only in {0, sigma_CE^2}") {
        Graph star;
        star.n = 4;
        star.adjacency = Matrix::Zero(4, 4);
        for (int i = 1; i < 4; ++i) star.adjacency(0, i) = star.adjacency(i, 0) = 1.0;
        PositionalCovariance pe = build_positional_covariance(star, PeKind::Centrality, 0, hp);
        REQUIRE(pe.R(0, 0) == hp.sigma_CE2);
        REQUIRE(pe.R(0, 1) == 0.0); // deg 3 vs deg 1
        REQUIRE(pe.R(1, 2) == hp.sigma_CE2);
        REQUIRE_NOTHROW(pe.check_invariants());
    }
    SECTION("rank_k out of range") {
        REQUIRE_THROWS_AS(build_positional_covariance(g, PeKind::LaplacianEigvec, g.n + 1, hp),
                          InvalidParameterError);
    }
    SECTION("isolated node fails for spectral kinds") {
        Graph iso;
        iso.n = 3;
        iso.adjacency = Matrix::Zero(3, 3);
        iso.adjacency(0, 1) = iso.adjacency(1, 0) = 1.0;
        REQUIRE_THROWS_AS(build_positional_covariance(iso, PeKind::LaplacianEigvec, 2, hp),
                          DegenerateError);
    }
}

#include "graphgp/graph.hpp"

#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace graphgp;

TEST_CASE("population SBM block structure") {
    SECTION("disconnected cliques at p=1, q=0") {
        Graph g = population_sbm({4, 1.0, 0.0, 1.0, 0.0});
        Matrix expected = Matrix::Zero(4, 4);
        expected.topLeftCorner(2, 2).setOnes();
        expected.bottomRightCorner(2, 2).setOnes();
        REQUIRE(g.adjacency == expected);
    }
    SECTION("generic block values") {
        Graph g = population_sbm({4, 0.9, 0.1, 1.0, 0.0});
        Matrix expected(4, 4);
        expected << 0.9, 0.9, 0.1, 0.1,
                    0.9, 0.9, 0.1, 0.1,
                    0.1, 0.1, 0.9, 0.9,
                    0.1, 0.1, 0.9, 0.9;
        REQUIRE(g.adjacency == expected);
    }
    SECTION("p = q collapses to a constant matrix") {
        Graph g = population_sbm({2, 0.5, 0.5, 1.0, 0.0});
        REQUIRE(g.adjacency == Matrix::Constant(2, 2, 0.5));
    }
    SECTION("odd n rejected") {
        SbmParams bad{3, 0.5, 0.1, 1.0, 0.0};
        REQUIRE_THROWS_AS(population_sbm(bad), InvalidParameterError);
    }
    SECTION("x0 must dominate |y0|") {
        SbmParams bad{4, 0.5, 0.1, 0.5, -0.6};
        REQUIRE_THROWS_AS(population_sbm(bad), InvalidParameterError);
    }
}

TEST_CASE("population SBM adjacency spectrum is rank 2") {
    // Block structure has eigenvalues (p+q)n/2 and (p-q)n/2 once each, rest 0.
    SbmParams params{8, 0.7, 0.2, 1.0, 0.0};
    Graph g = population_sbm(params);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g.adjacency);
    Vector ev = es.eigenvalues();
    std::vector<double> expected(static_cast<std::size_t>(params.n), 0.0);
    expected[static_cast<std::size_t>(params.n) - 1] = (params.p + params.q) * params.n / 2.0;
    expected[static_cast<std::size_t>(params.n) - 2] = (params.p - params.q) * params.n / 2.0;
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < params.n; ++i)
        REQUIRE_THAT(ev(i), Catch::Matchers::WithinAbs(expected[static_cast<std::size_t>(i)], 1e-12));
}

TEST_CASE("sampled CSBM") {
    SECTION("deterministic at p=1, q=0") {
        Graph g = sample_csbm({100, 1.0, 0.0, 1.0, 0.0}, 4, 0.0, 7);
        Matrix expected = Matrix::Zero(100, 100);
        expected.topLeftCorner(50, 50).setOnes();
        expected.bottomRightCorner(50, 50).setOnes();
        expected.diagonal().setZero();
        REQUIRE(g.adjacency == expected);
        REQUIRE((*g.labels)(0) == 0);
        REQUIRE((*g.labels)(99) == 1);
    }
    SECTION("bit reproducible for a fixed seed") {
        Graph a = sample_csbm({60, 0.4, 0.1, 1.0, 0.0}, 6, 1.5, 1234);
        Graph b = sample_csbm({60, 0.4, 0.1, 1.0, 0.0}, 6, 1.5, 1234);
        REQUIRE(a.adjacency == b.adjacency);
        REQUIRE(a.features == b.features);
        Graph c = sample_csbm({60, 0.4, 0.1, 1.0, 0.0}, 6, 1.5, 1235);
        REQUIRE(a.adjacency != c.adjacency);
    }
    SECTION("adjacency exactly symmetric with zero diagonal") {
        Graph g = sample_csbm({40, 0.5, 0.2, 1.0, 0.0}, 3, 0.0, 99);
        REQUIRE(g.adjacency == g.adjacency.transpose().eval());
        REQUIRE(g.adjacency.diagonal().isZero(0.0));
    }
    SECTION("empirical within-block edge density concentrates at p") {
        // Monte-Carlo over 50 seeds; 3 sigma on the aggregated Bernoulli count.
        SbmParams params{100, 0.6, 0.2, 1.0, 0.0};
        long long intra_edges = 0, intra_pairs = 0;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Graph g = sample_csbm(params, 2, 0.0, seed);
            int half = params.n / 2;
            for (int i = 0; i < params.n; ++i)
                for (int j = i + 1; j < params.n; ++j) {
                    if ((i < half) != (j < half)) continue;
                    ++intra_pairs;
                    if (g.adjacency(i, j) > 0.0) ++intra_edges;
                }
        }
        double density = static_cast<double>(intra_edges) / static_cast<double>(intra_pairs);
        double sigma = std::sqrt(params.p * (1.0 - params.p) / static_cast<double>(intra_pairs));
        REQUIRE(std::abs(density - params.p) <= 3.0 * sigma);
    }
}

TEST_CASE("normalized adjacency") {
    SECTION("identity is a fixed point") {
        Graph g;
        g.n = 3;
        g.adjacency = Matrix::Identity(3, 3);
        REQUIRE(normalized_adjacency(g) == Matrix::Identity(3, 3));
    }
    SECTION("all-ones 2x2 gives 0.5 everywhere") {
        Graph g;
        g.n = 2;
        g.adjacency = Matrix::Ones(2, 2);
        REQUIRE(normalized_adjacency(g).isApprox(Matrix::Constant(2, 2, 0.5), 1e-15));
    }
    SECTION("population SBM vs extended-precision oracle") {
        Graph g = population_sbm({4, 0.9, 0.1, 1.0, 0.0});
        Matrix s = normalized_adjacency(g);
        // direct D^{-1/2} A D^{-1/2} in long double
        int n = g.n;
        std::vector<long double> deg(static_cast<std::size_t>(n), 0.0L);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) deg[static_cast<std::size_t>(i)] += g.adjacency(i, j);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                long double v = g.adjacency(i, j) /
                                std::sqrt(deg[static_cast<std::size_t>(i)] *
                                          deg[static_cast<std::size_t>(j)]);
                REQUIRE_THAT(s(i, j), Catch::Matchers::WithinAbs(static_cast<double>(v), 1e-14));
            }
        REQUIRE(s == s.transpose().eval());
    }
    SECTION("isolated node is an error") {
        Graph g;
        g.n = 3;
        g.adjacency = Matrix::Zero(3, 3);
        g.adjacency(0, 1) = g.adjacency(1, 0) = 1.0;
        REQUIRE_THROWS_AS(normalized_adjacency(g), DegenerateError);
    }
}

TEST_CASE("normalized Laplacian spectrum") {
    SECTION("complete graph K2 has eigenvalues {0, 2}") {
        Graph g;
        g.n = 2;
        g.adjacency = Matrix::Ones(2, 2);
        g.adjacency.diagonal().setZero();
        SpectralDecomposition spec = normalized_laplacian_spectrum(g);
        REQUIRE_THAT(spec.eigenvalues(0), Catch::Matchers::WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(spec.eigenvalues(1), Catch::Matchers::WithinAbs(2.0, 1e-12));
    }
    SECTION("population SBM eigenvalues match the block-constant analysis") {
        // Constant degree d = (n/2)(p+q), so L = I - A/d with A eigenvalues
        // {(p+q)n/2, (p-q)n/2, 0 x (n-2)}; L has {0, 2q/(p+q), 1 x (n-2)}.
        double p = 0.9, q = 0.1;
        int n = 8;
        Graph g = population_sbm({n, p, q, 1.0, 0.0});
        SpectralDecomposition spec = normalized_laplacian_spectrum(g);
        std::vector<double> expected{0.0, 2.0 * q / (p + q)};
        for (int i = 0; i < n - 2; ++i) expected.push_back(1.0);
        std::sort(expected.begin(), expected.end());
        for (int i = 0; i < n; ++i)
            REQUIRE_THAT(spec.eigenvalues(i),
                         Catch::Matchers::WithinAbs(expected[static_cast<std::size_t>(i)], 1e-8));
        // exactly 2 distinct non-bulk values plus the repeated bulk value
        std::set<long long> distinct;
        for (int i = 0; i < n; ++i)
            distinct.insert(llround(spec.eigenvalues(i) * 1e8));
        REQUIRE(distinct.size() == 3);
    }
    SECTION("reconstruction and orthonormality") {
        Rng rng(5);
        Graph g;
        g.n = 7;
        g.adjacency = test_helpers::random_adjacency(rng, 7, 0.5);
        SpectralDecomposition spec = normalized_laplacian_spectrum(g);
        Matrix l = Matrix::Identity(7, 7) - normalized_adjacency(g);
        REQUIRE((spec.reconstruct() - l).norm() < 1e-8);
        REQUIRE((spec.eigenvectors.transpose() * spec.eigenvectors - Matrix::Identity(7, 7))
                    .norm() < 1e-8);
        REQUIRE(spec.eigenvalues(0) >= -1e-8);
        REQUIRE(spec.eigenvalues(6) <= 2.0 + 1e-8);
    }
}

TEST_CASE("shortest path buckets") {
    SECTION("path graph distances") {
        Graph g;
        g.n = 3;
        g.adjacency = Matrix::Zero(3, 3);
        g.adjacency(0, 1) = g.adjacency(1, 0) = 1.0;
        g.adjacency(1, 2) = g.adjacency(2, 1) = 1.0;
        StructuralRelation rel = shortest_path_buckets(g, 4);
        REQUIRE(rel.relation(0, 2) == 2);
        REQUIRE(rel.relation(0, 1) == 1);
        for (int i = 0; i < 3; ++i) REQUIRE(rel.relation(i, i) == 0);
        REQUIRE(rel.relation == rel.relation.transpose().eval());
    }
    SECTION("bucket cap and unreachable sentinel") {
        Graph g;
        g.n = 4;
        g.adjacency = Matrix::Zero(4, 4);
        g.adjacency(0, 1) = g.adjacency(1, 0) = 1.0; // component {0,1}
        g.adjacency(2, 3) = g.adjacency(3, 2) = 1.0; // component {2,3}
        StructuralRelation rel = shortest_path_buckets(g, 4);
        REQUIRE(rel.relation(0, 2) == rel.sentinel());
        REQUIRE(rel.relation(1, 3) == 5);
    }
    SECTION("triangle inequality below the cap") {
        Rng rng(11);
        Graph g;
        g.n = 9;
        g.adjacency = test_helpers::random_adjacency(rng, 9, 0.3);
        int cap = 8;
        StructuralRelation rel = shortest_path_buckets(g, cap);
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                for (int k = 0; k < 9; ++k) {
                    if (rel.relation(i, j) < cap && rel.relation(i, k) < cap &&
                        rel.relation(k, j) < cap)
                        REQUIRE(rel.relation(i, j) <= rel.relation(i, k) + rel.relation(k, j));
                }
    }
}

TEST_CASE("self-loop flag") {
    Graph g = population_sbm({4, 0.5, 0.1, 1.0, 0.0});
    Graph gs = with_self_loops(g);
    REQUIRE(gs.adjacency.diagonal().isApproxToConstant(1.5));
    REQUIRE(g.adjacency.diagonal().isApproxToConstant(0.5));
}

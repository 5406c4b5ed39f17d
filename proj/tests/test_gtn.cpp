#include "graphgp/gtn.hpp"

#include "graphgp/graph.hpp"
#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace graphgp;

namespace {

/// Explicit |T|^K composition enumeration:
/// sum over tuples (i_1..i_K) of (A_{i_1}...A_{i_K}) K (A_{i_K}^T...A_{i_1}^T).
Matrix gtn_enumeration_oracle(const Matrix& k, const std::vector<Matrix>& relations, int klen,
                              const HyperParams& hp) {
    std::vector<Matrix> atil = gtn_normalize_relations(relations);
    int t = static_cast<int>(atil.size());
    int n = static_cast<int>(k.rows());
    Matrix total = Matrix::Zero(n, n);
    std::vector<int> tuple(static_cast<std::size_t>(klen), 0);
    for (;;) {
        Matrix prod = Matrix::Identity(n, n);
        for (int step = 0; step < klen; ++step)
            prod = prod * atil[static_cast<std::size_t>(tuple[static_cast<std::size_t>(step)])];
        total += prod * k * prod.transpose();
        int pos = klen - 1;
        while (pos >= 0 && ++tuple[static_cast<std::size_t>(pos)] == t) {
            tuple[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    double var_prod = 1.0;
    for (double v : hp.gtn_sigma_k2) var_prod *= v;
    return hp.sigma_H2 * hp.sigma_w2 * var_prod * total;
}

std::vector<Matrix> random_relations(Rng& rng, int types, int n) {
    std::vector<Matrix> rel;
    for (int t = 0; t < types; ++t) rel.push_back(test_helpers::random_adjacency(rng, n, 0.5, true));
    return rel;
}

} // namespace

TEST_CASE("gtn_step basics") {
    Rng rng(71);
    SECTION("single identity relation scales by the variance product") {
        Matrix k = test_helpers::random_psd(rng, 4);
        HyperParams hp;
        hp.sigma_H2 = 1.3;
        hp.sigma_w2 = 0.8;
        hp.gtn_sigma_k2 = {0.5, 2.0};
        Matrix out = gtn_step(k, {Matrix::Identity(4, 4)}, 2, hp);
        double c = hp.sigma_H2 * hp.sigma_w2 * 0.5 * 2.0;
        REQUIRE(relative_frobenius_error(out, c * k) < 1e-13);
    }
    SECTION("zero step variances give the zero matrix") {
        Matrix k = test_helpers::random_psd(rng, 3);
        HyperParams hp;
        hp.gtn_sigma_k2 = {0.0};
        Matrix out = gtn_step(k, random_relations(rng, 2, 3), 1, hp);
        REQUIRE(out.cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("zero-degree relation row is degenerate") {
        Matrix bad = Matrix::Zero(3, 3);
        bad(0, 1) = 1.0; // row 1 and 2 empty
        REQUIRE_THROWS_AS(gtn_step(Matrix::Identity(3, 3), {bad}, 1, HyperParams{}),
                          DegenerateError);
    }
    SECTION("variance list must match the meta-path length") {
        HyperParams hp;
        hp.gtn_sigma_k2 = {1.0, 1.0};
        REQUIRE_THROWS_AS(
            gtn_step(Matrix::Identity(3, 3), random_relations(rng, 2, 3), 3, hp),
            InvalidParameterError);
    }
}

TEST_CASE("gtn_step equals the composition enumeration") {
    Rng rng(72);
    for (int types = 2; types <= 3; ++types) {
        for (int klen = 1; klen <= 3; ++klen) {
            for (int trial = 0; trial < 4; ++trial) {
                int n = 3 + static_cast<int>(rng.bits() % 3); // n <= 5
                Matrix k = test_helpers::random_psd(rng, n);
                auto relations = random_relations(rng, types, n);
                HyperParams hp = test_helpers::random_hyperparams(rng);
                hp.gtn_sigma_k2.assign(static_cast<std::size_t>(klen), 0.0);
                for (auto& v : hp.gtn_sigma_k2) v = 0.5 + rng.uniform();
                Matrix fast = gtn_step(k, relations, klen, hp);
                Matrix slow = gtn_enumeration_oracle(k, relations, klen, hp);
                REQUIRE(relative_frobenius_error(fast, slow) < 1e-12);
            }
        }
    }
}

TEST_CASE("gtn_step block-constancy on block relations") {
    Graph r1 = population_sbm({6, 0.9, 0.2, 1.0, 0.0});
    Graph r2 = population_sbm({6, 0.3, 0.6, 1.0, 0.0});
    Matrix k = block_kernel(6, 1.0, 0.25);
    Matrix out = gtn_step(k, {r1.adjacency, r2.adjacency}, 2, HyperParams{});
    test_helpers::block_scalars(out, 1e-10);
    REQUIRE(out == out.transpose().eval());
    REQUIRE(smallest_eigenvalue(out) >= -1e-8 * out.diagonal().maxCoeff());
}

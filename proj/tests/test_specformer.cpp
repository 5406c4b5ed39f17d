#include "graphgp/specformer.hpp"

#include "graphgp/kernels.hpp"
#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace graphgp;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

/// Literal double-sum oracle for the linear token step:
/// K_ij = c * sum_{k,l} K_kl K_ik K_jl.
Matrix token_step_oracle(const Matrix& k, const HyperParams& hp) {
    int n = static_cast<int>(k.rows());
    double c = hp.sigma_O2 * hp.sigma_V2 * hp.sigma_Q2 * hp.sigma_K2;
    Matrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int kk = 0; kk < n; ++kk)
                for (int l = 0; l < n; ++l) acc += k(kk, l) * k(i, kk) * k(j, l);
            out(i, j) = c * acc;
        }
    return out;
}

SpectralDecomposition decompose(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    return {es.eigenvalues(), es.eigenvectors()};
}

} // namespace

TEST_CASE("specformer_token_kernel_init") {
    SECTION("identical eigenvalues give identical rows") {
        SpectralDecomposition spec;
        spec.eigenvalues = Vector::Constant(3, 0.7);
        spec.eigenvectors = Matrix::Identity(3, 3);
        Matrix k = specformer_token_kernel_init(spec, 4, 1.5);
        REQUIRE_THAT(k(0, 1), WithinAbs(k(0, 0), 1e-15));
        REQUIRE_THAT(k(1, 2), WithinAbs(k(0, 0), 1e-15));
    }
    SECTION("epsilon = 0 reduces to (lambda_a lambda_b + d/2)/(d+1)") {
        SpectralDecomposition spec;
        spec.eigenvalues = Vector(3);
        spec.eigenvalues << 0.0, 0.8, 1.7;
        spec.eigenvectors = Matrix::Identity(3, 3);
        int d = 6;
        Matrix k = specformer_token_kernel_init(spec, d, 0.0);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                REQUIRE_THAT(k(a, b),
                             WithinAbs((spec.eigenvalues(a) * spec.eigenvalues(b) + d / 2.0) /
                                           (d + 1.0),
                                       1e-14));
    }
    SECTION("Gram matrix is PSD") {
        Rng rng(61);
        SpectralDecomposition spec;
        spec.eigenvalues = rng.normal_vector(6).cwiseAbs();
        spec.eigenvectors = Matrix::Identity(6, 6);
        Matrix k = specformer_token_kernel_init(spec, 8, 2.0);
        REQUIRE(smallest_eigenvalue(k) >= -1e-12);
    }
    SECTION("odd embed dim rejected") {
        SpectralDecomposition spec;
        spec.eigenvalues = Vector::Zero(2);
        spec.eigenvectors = Matrix::Identity(2, 2);
        REQUIRE_THROWS_AS(specformer_token_kernel_init(spec, 5, 1.0), InvalidParameterError);
    }
}

TEST_CASE("specformer_token_step_linear") {
    Rng rng(62);
    SECTION("identity kernel with unit variances is a fixed point") {
        Matrix k = Matrix::Identity(4, 4);
        REQUIRE(relative_frobenius_error(specformer_token_step_linear(k, HyperParams{}), k) <
                1e-15);
    }
    SECTION("pins the literal double-sum index convention") {
        for (int trial = 0; trial < 25; ++trial) {
            int n = 3 + static_cast<int>(rng.bits() % 3);
            Matrix k = test_helpers::random_psd(rng, n);
            HyperParams hp = test_helpers::random_hyperparams(rng);
            Matrix fast = specformer_token_step_linear(k, hp);
            Matrix slow = token_step_oracle(k, hp);
            REQUIRE(relative_frobenius_error(fast, slow) < 1e-10);
        }
    }
    SECTION("homogeneous of degree 3") {
        Matrix k = test_helpers::random_psd(rng, 4);
        double c = 1.7;
        Matrix lhs = specformer_token_step_linear(c * k, HyperParams{});
        Matrix rhs = c * c * c * specformer_token_step_linear(k, HyperParams{});
        REQUIRE(relative_frobenius_error(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("specformer_lambda_kernel") {
    SECTION("identity decoder scales the terminal kernel") {
        HyperParams hp;
        hp.sigma_lambda2 = 2.0;
        Matrix k = specformer_lambda_kernel(Matrix::Identity(3, 3), hp,
                                            DecoderNonlinearity::Identity);
        REQUIRE(k == (2.0 * Matrix::Identity(3, 3)).eval());
    }
    SECTION("relu decoder on the identity") {
        Matrix k = specformer_lambda_kernel(Matrix::Identity(3, 3), HyperParams{},
                                            DecoderNonlinearity::Relu);
        REQUIRE_THAT(k(0, 0), WithinAbs(0.5, 1e-14));
        REQUIRE_THAT(k(0, 1), WithinAbs(1.0 / (2.0 * kPi), 1e-14));
    }
    SECTION("relu decoder matches Monte Carlo within 3 standard errors") {
        Rng rng(63);
        Matrix kh = test_helpers::random_psd(rng, 3);
        HyperParams hp;
        hp.sigma_lambda2 = 1.3;
        Matrix closed = specformer_lambda_kernel(kh, hp, DecoderNonlinearity::Relu);

        // MC oracle: lambda ~ N(0, sl^2 K_H), relu, average outer products.
        Matrix factor = psd_factor(hp.sigma_lambda2 * kh);
        long long num_samples = 1000000;
        Matrix sum = Matrix::Zero(3, 3), sumsq = Matrix::Zero(3, 3);
        Rng mc(777);
        for (long long s = 0; s < num_samples; ++s) {
            Vector lam = (factor * mc.normal_vector(3)).cwiseMax(0.0);
            Matrix outer = lam * lam.transpose();
            sum += outer;
            sumsq += outer.cwiseProduct(outer);
        }
        Matrix mean = sum / static_cast<double>(num_samples);
        Matrix var = sumsq / static_cast<double>(num_samples) - mean.cwiseProduct(mean);
        Matrix se = (var / static_cast<double>(num_samples)).cwiseSqrt();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(std::abs(mean(i, j) - closed(i, j)) <= 3.0 * se(i, j) + 1e-12);
    }
}

TEST_CASE("specformer_node_step") {
    Rng rng(64);
    SECTION("all-ones filter kernel is the scaled identity map") {
        Matrix k = test_helpers::random_psd(rng, 5);
        SpectralDecomposition spec;
        spec.eigenvectors = test_helpers::random_orthonormal(rng, 5);
        spec.eigenvalues = Vector::Zero(5);
        HyperParams hp;
        hp.sigma_H2 = 1.2;
        hp.sigma_w2 = 0.7;
        Matrix out = specformer_node_step(k, spec, Matrix::Ones(5, 5), hp);
        REQUIRE(relative_frobenius_error(out, hp.sigma_H2 * hp.sigma_w2 * k) < 1e-12);
    }
    SECTION("rank-1 filter from the adjacency spectrum collapses to GCN") {
        Graph g = population_sbm({6, 0.8, 0.2, 1.0, 0.1});
        SpectralDecomposition aspec = decompose(g.adjacency);
        Matrix klambda = aspec.eigenvalues * aspec.eigenvalues.transpose();
        Matrix k = block_kernel(6, 1.0, 0.1);
        HyperParams hp;
        Matrix spec_step = specformer_node_step(k, aspec, klambda, hp);
        Matrix gcn = gcn_step(k, g.adjacency, hp);
        REQUIRE(relative_frobenius_error(spec_step, gcn) < 1e-12);
        test_helpers::block_scalars(spec_step, 1e-9);
    }
    SECTION("matches the explicit eigenbasis-loop oracle") {
        for (int trial = 0; trial < 15; ++trial) {
            int n = 3 + static_cast<int>(rng.bits() % 3);
            Matrix k = test_helpers::random_psd(rng, n);
            Matrix klambda = test_helpers::random_psd(rng, n);
            SpectralDecomposition spec;
            spec.eigenvectors = test_helpers::random_orthonormal(rng, n);
            spec.eigenvalues = Vector::Zero(n);
            HyperParams hp = test_helpers::random_hyperparams(rng);
            Matrix fast = specformer_node_step(k, spec, klambda, hp);

            const Matrix& u = spec.eigenvectors;
            Matrix inner(n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    double acc = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) acc += u(i, a) * k(i, j) * u(j, b);
                    inner(a, b) = klambda(a, b) * acc;
                }
            Matrix slow(n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    double acc = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) acc += u(a, i) * inner(i, j) * u(b, j);
                    slow(a, b) = hp.sigma_H2 * hp.sigma_w2 * acc;
                }
            REQUIRE(relative_frobenius_error(fast, slow) < 1e-10);
        }
    }
    SECTION("Schur-product congruence preserves PSD") {
        Matrix k = test_helpers::random_psd(rng, 5);
        Matrix klambda = test_helpers::random_psd(rng, 5);
        SpectralDecomposition spec;
        spec.eigenvectors = test_helpers::random_orthonormal(rng, 5);
        spec.eigenvalues = Vector::Zero(5);
        Matrix out = specformer_node_step(k, spec, klambda, HyperParams{});
        REQUIRE(out == out.transpose().eval());
        REQUIRE(smallest_eigenvalue(out) >= -1e-8 * out.diagonal().maxCoeff());
    }
}

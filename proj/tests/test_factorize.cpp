#include <random>

#include "doctest.h"
#include "mvmc/factorize.hpp"
#include "mvmc/errors.hpp"

using namespace mvmc;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < M.size(); ++i) M(i) = g(rng);
    return M;
}

Eigen::MatrixXd random_nonneg(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < M.size(); ++i) M(i) = u(rng);
    return M;
}

}  // namespace

TEST_CASE("semi-nmf: exact factorization is a fixed point") {
    Eigen::MatrixXd B0 = random_matrix(6, 2, 1);
    Eigen::MatrixXd R0 = random_nonneg(6, 2, 2);
    Eigen::MatrixXd M = B0 * R0.transpose();
    SemiNmfPair state{B0, R0};
    for (int i = 0; i < 5; ++i) semi_nmf_update(M, state);
    CHECK(semi_nmf_residual(M, state) < 1e-8);
}

TEST_CASE("semi-nmf: residual non-increasing over 50 updates") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Eigen::MatrixXd M = random_matrix(12, 12, seed);
        auto state = semi_nmf_init(M, 3, seed);
        double prev = semi_nmf_residual(M, state);
        for (int it = 0; it < 50; ++it) {
            semi_nmf_update(M, state);
            const double cur = semi_nmf_residual(M, state);
            CHECK(cur <= prev + 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("semi-nmf: R stays nonnegative, zero entries included") {
    Eigen::MatrixXd M = random_matrix(8, 8, 7);
    auto state = semi_nmf_init(M, 3, 7);
    state.R(0, 0) = 0.0;
    for (int it = 0; it < 10; ++it) {
        semi_nmf_update(M, state);
        CHECK(state.R.minCoeff() >= 0.0);
    }
}

TEST_CASE("semi-nmf rejects r > n") {
    Eigen::MatrixXd M = random_matrix(4, 4, 1);
    CHECK_THROWS_AS(semi_nmf_init(M, 5, 0), ParameterError);
}

TEST_CASE("tri-factor: exact factorization stays at zero residual") {
    Eigen::MatrixXd C0 = random_nonneg(6, 2, 1);
    Eigen::MatrixXd S0 = random_matrix(2, 3, 2);
    Eigen::MatrixXd R0 = random_nonneg(8, 3, 3);
    Eigen::MatrixXd T = C0 * S0 * R0.transpose();
    TriFactorTriple state{C0, S0, R0};
    for (int i = 0; i < 5; ++i) tri_factor_update(T, state);
    CHECK(tri_factor_residual(T, state) < 1e-8);
}

TEST_CASE("tri-factor: objective non-increasing over 100 updates") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        Eigen::MatrixXd T = random_matrix(6, 8, seed + 40);
        auto state = tri_factor_init(T, 2, 2, seed);
        double prev = tri_factor_residual(T, state);
        for (int it = 0; it < 100; ++it) {
            tri_factor_update(T, state);
            const double cur = tri_factor_residual(T, state);
            CHECK(cur <= prev + 1e-9);
            prev = cur;
            CHECK(state.C.minCoeff() >= 0.0);
            CHECK(state.R.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("tri-factor rejects oversize cluster counts") {
    Eigen::MatrixXd T = random_matrix(4, 6, 1);
    CHECK_THROWS_AS(tri_factor_init(T, 5, 2, 0), ParameterError);
    CHECK_THROWS_AS(tri_factor_init(T, 2, 7, 0), ParameterError);
}

TEST_CASE("harden_assignments") {
    SUBCASE("argmax per row") {
        Eigen::MatrixXd R(2, 2);
        R << 0.9, 0.1, 0.2, 0.8;
        CHECK(harden_assignments(R) == std::vector<int>{0, 1});
    }
    SUBCASE("ties break to the lowest index") {
        Eigen::MatrixXd R(1, 2);
        R << 0.5, 0.5;
        CHECK(harden_assignments(R) == std::vector<int>{0});
    }
    SUBCASE("all-zero rows go to cluster 0 with a warning") {
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(3, 2);
        R(0, 1) = 1.0;
        int warnings = 0;
        auto labels = harden_assignments(R, &warnings);
        CHECK(labels == std::vector<int>{1, 0, 0});
        CHECK(warnings == 2);
    }
    SUBCASE("invariant under positive row scaling") {
        Eigen::MatrixXd R = random_nonneg(10, 4, 9);
        Eigen::MatrixXd scaled = R;
        for (Eigen::Index i = 0; i < R.rows(); ++i)
            scaled.row(i) *= 0.1 + static_cast<double>(i);
        CHECK(harden_assignments(R) == harden_assignments(scaled));
    }
    SUBCASE("column permutation permutes labels consistently") {
        Eigen::MatrixXd R = random_nonneg(10, 3, 12);
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
        P(0, 2) = P(1, 0) = P(2, 1) = 1.0;  // col j -> col perm[j]
        auto base = harden_assignments(R);
        auto permuted = harden_assignments(R * P);
        std::vector<int> perm = {2, 0, 1};
        for (size_t i = 0; i < base.size(); ++i)
            CHECK(permuted[i] == perm[base[i]]);
    }
}

TEST_CASE("kmeans recovers well-separated blobs deterministically") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Eigen::MatrixXd X(2, 30);
    for (int i = 0; i < 30; ++i) {
        const int c = i % 3;
        X(0, i) = 10.0 * c + 0.05 * g(rng);
        X(1, i) = -5.0 * c + 0.05 * g(rng);
    }
    auto labels = kmeans_labels(X, 3, 99);
    auto labels2 = kmeans_labels(X, 3, 99);
    CHECK(labels == labels2);
    // same-blob samples share a label
    for (int i = 3; i < 30; ++i) CHECK(labels[i] == labels[i % 3]);
}

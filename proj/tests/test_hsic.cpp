#include <random>

#include "doctest.h"
#include "mvmc/hsic.hpp"
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

// Brute-force HSIC: explicit H, explicit kernels, explicit trace.
double hsic_oracle(const Eigen::MatrixXd& D1, const Eigen::MatrixXd& D2) {
    const Eigen::Index n = D1.cols();
    const Eigen::MatrixXd H = centering_matrix(n);
    const Eigen::MatrixXd K1 = D1.transpose() * D1;
    const Eigen::MatrixXd K2 = D2.transpose() * D2;
    const Eigen::MatrixXd prod = K1 * H * K2 * H;
    return prod.trace() / ((n - 1.0) * (n - 1.0));
}

}  // namespace

TEST_CASE("centering matrix for n=2") {
    auto H = centering_matrix(2);
    CHECK(H(0, 0) == doctest::Approx(0.5));
    CHECK(H(0, 1) == doctest::Approx(-0.5));
    CHECK(H(1, 0) == doctest::Approx(-0.5));
    CHECK(H(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("centering matrix annihilates constants and is idempotent") {
    auto H5 = centering_matrix(5);
    CHECK((H5 * Eigen::VectorXd::Ones(5)).norm() < 1e-12);
    auto H7 = centering_matrix(7);
    CHECK((H7 * H7 - H7).norm() < 1e-10);
    CHECK_THROWS_AS(centering_matrix(1), ParameterError);
}

TEST_CASE("hsic of a constant matrix is zero") {
    auto D = random_matrix(4, 6, 1);
    Eigen::MatrixXd C = Eigen::MatrixXd::Constant(4, 6, 3.7);
    CHECK(hsic_pair(D, C) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("self-hsic is nonnegative") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto D = random_matrix(5, 8, seed);
        CHECK(hsic_pair(D, D) >= 0.0);
    }
}

TEST_CASE("hsic matches the brute-force trace on a 2x2 case") {
    Eigen::MatrixXd D1(2, 2), D2(2, 2);
    D1 << 1, 0, 0, 1;
    D2 << 1, 1, 0, 0;
    CHECK(hsic_pair(D1, D2) == doctest::Approx(hsic_oracle(D1, D2)).epsilon(1e-12));
}

TEST_CASE("hsic matches the brute-force trace on random matrices") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto D1 = random_matrix(6, 9, seed);
        auto D2 = random_matrix(6, 9, seed + 500);
        CHECK(hsic_pair(D1, D2) ==
              doctest::Approx(hsic_oracle(D1, D2)).epsilon(1e-10));
    }
}

TEST_CASE("hsic is symmetric and rejects shape mismatch") {
    auto D1 = random_matrix(4, 7, 3);
    auto D2 = random_matrix(4, 7, 4);
    CHECK(hsic_pair(D1, D2) == doctest::Approx(hsic_pair(D2, D1)).epsilon(1e-10));
    CHECK_THROWS_AS(hsic_pair(D1, random_matrix(4, 6, 5)), ShapeError);
}

TEST_CASE("hsic is invariant under constant shifts") {
    auto D1 = random_matrix(5, 8, 10);
    auto D2 = random_matrix(5, 8, 11);
    Eigen::MatrixXd shifted = D2.array() + 2.5;
    CHECK(hsic_pair(D1, shifted) ==
          doctest::Approx(hsic_pair(D1, D2)).epsilon(1e-8));
}

TEST_CASE("diversity penalty h=1 is zero with a zero kernel") {
    auto result = diversity_penalty({random_matrix(4, 4, 1)});
    CHECK(result.value == 0.0);
    REQUIRE(result.aggregated.size() == 1);
    CHECK(result.aggregated[0].norm() == 0.0);
}

TEST_CASE("diversity penalty with a constant partner is zero") {
    auto D1 = random_matrix(4, 4, 2);
    Eigen::MatrixXd C = Eigen::MatrixXd::Constant(4, 4, 1.3);
    CHECK(diversity_penalty({D1, C}).value == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("aggregated-kernel form equals the pairwise sum") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<Eigen::MatrixXd> Ds = {random_matrix(4, 4, seed),
                                           random_matrix(4, 4, seed + 100),
                                           random_matrix(4, 4, seed + 200)};
        double pairwise = 0.0;
        for (size_t k = 0; k < Ds.size(); ++k)
            for (size_t k2 = 0; k2 < Ds.size(); ++k2)
                if (k != k2) pairwise += hsic_oracle(Ds[k], Ds[k2]);
        const auto result = diversity_penalty(Ds);
        CHECK(result.value == doctest::Approx(pairwise).epsilon(1e-8));
        CHECK(result.value >= -1e-8);
        for (const auto& K : result.aggregated)
            CHECK((K - K.transpose()).norm() < 1e-10);
    }
}

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "mvmc/graph.hpp"

using namespace mvmc;

namespace {

Eigen::MatrixXd random_points(int d, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd X(d, n);
    for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = g(rng);
    return X;
}

// Independent pairwise-sum form of the smoothness penalty:
// sum_v sum_ij ||u_i - u_j||^2 W^v_ij with u_i columns of U.
double smoothness_pairwise(const Eigen::MatrixXd& U,
                           const std::vector<Eigen::MatrixXd>& Ws) {
    double total = 0.0;
    for (const auto& W : Ws)
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j)
                total += (U.col(i) - U.col(j)).squaredNorm() * W(i, j);
    return total / 2.0;  // each unordered pair counted twice
}

}  // namespace

TEST_CASE("knn graph on three collinear points") {
    Eigen::MatrixXd X(1, 3);
    X << 0, 1, 2;
    auto W = build_knn_graph(X, 1, WidthRule::fixed(1.0));
    const double expected = std::exp(-0.5);
    CHECK(W(0, 1) == doctest::Approx(expected));
    CHECK(W(1, 0) == doctest::Approx(expected));
    CHECK(W(1, 2) == doctest::Approx(expected));
    CHECK(W(2, 1) == doctest::Approx(expected));
    CHECK(W(0, 2) == 0.0);
    CHECK(W.diagonal().norm() == 0.0);
}

TEST_CASE("epsilon = n-1 gives a dense off-diagonal graph") {
    auto X = random_points(3, 8, 11);
    auto W = build_knn_graph(X, 7);
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = 0; j < 8; ++j)
            if (i != j) CHECK(W(i, j) > 0.0);
}

TEST_CASE("identical neighboring points get similarity 1") {
    Eigen::MatrixXd X(2, 3);
    X << 0, 0, 5, 0, 0, 5;
    auto W = build_knn_graph(X, 1, WidthRule::fixed(1.0));
    CHECK(W(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("epsilon >= n is rejected") {
    auto X = random_points(2, 4, 1);
    CHECK_THROWS_AS(build_knn_graph(X, 4), ParameterError);
}

TEST_CASE("graph invariants on random builds") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto X = random_points(4, 15, seed);
        auto W = build_knn_graph(X, 5);
        CHECK((W - W.transpose()).norm() == doctest::Approx(0.0));
        CHECK(W.minCoeff() >= 0.0);
        CHECK(W.maxCoeff() <= 1.0);
        CHECK(W.diagonal().norm() == 0.0);
    }
}

TEST_CASE("laplacian of a single edge") {
    Eigen::MatrixXd W(2, 2);
    W << 0, 1, 1, 0;
    auto L = laplacian_sum({W});
    Eigen::MatrixXd expected(2, 2);
    expected << 1, -1, -1, 1;
    CHECK((L - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("laplacian is additive over views") {
    Eigen::MatrixXd W(3, 3);
    W << 0, 1, 0.5, 1, 0, 0.2, 0.5, 0.2, 0;
    auto L1 = laplacian_sum({W});
    auto L2 = laplacian_sum({W, W});
    CHECK((L2 - 2.0 * L1).norm() == doctest::Approx(0.0));
}

TEST_CASE("laplacian of the empty graph is zero") {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(4, 4);
    CHECK(laplacian_sum({W}).norm() == 0.0);
}

TEST_CASE("laplacian rejects shape mismatch") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 4);
    CHECK_THROWS_AS(laplacian_sum({A, B}), ShapeError);
}

TEST_CASE("laplacian row sums and PSD on random instances") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        MultiViewDataset ds;
        ds.views.push_back(random_points(3, 20, seed));
        ds.views.push_back(random_points(5, 20, seed + 100));
        auto gs = build_graph_set(ds, 4);
        const auto& L = gs.laplacian_sum;
        CHECK((L.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-10);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("smoothness penalty basics") {
    Eigen::MatrixXd W(2, 2);
    W << 0, 1, 1, 0;
    auto L = laplacian_sum({W});

    SUBCASE("constant columns give zero") {
        Eigen::MatrixXd U = Eigen::MatrixXd::Ones(2, 2);
        CHECK(smoothness_penalty(U, L) == doctest::Approx(0.0));
    }
    SUBCASE("identity gives tr(L)") {
        Eigen::MatrixXd U = Eigen::MatrixXd::Identity(2, 2);
        CHECK(smoothness_penalty(U, L) == doctest::Approx(2.0));
    }
}

TEST_CASE("trace form equals pairwise-sum form") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 5; ++trial) {
        MultiViewDataset ds;
        ds.views.push_back(random_points(3, 10, 1000 + trial));
        ds.views.push_back(random_points(4, 10, 2000 + trial));
        auto gs = build_graph_set(ds, 3);
        Eigen::MatrixXd U(10, 10);
        for (Eigen::Index i = 0; i < U.size(); ++i) U(i) = g(rng);
        const double trace_form = smoothness_penalty(U, gs.laplacian_sum);
        const double pair_form = smoothness_pairwise(U, gs.similarities);
        CHECK(trace_form == doctest::Approx(pair_form).epsilon(1e-8));
        CHECK(trace_form >= -1e-10);
    }
}

#include "mvmc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mvmc/errors.hpp"

namespace mvmc {

Eigen::MatrixXd build_knn_graph(const Eigen::MatrixXd& X, int epsilon,
                                const WidthRule& rule, double* sigma_out) {
    const Eigen::Index n = X.cols();
    if (epsilon < 1) throw ParameterError("epsilon must be >= 1");
    if (epsilon >= n)
        throw ParameterError("epsilon=" + std::to_string(epsilon) +
                             " must be smaller than n=" + std::to_string(n));

    Eigen::MatrixXd dist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = (X.col(i) - X.col(j)).norm();
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }

    double sigma;
    if (rule.fixed_sigma) {
        sigma = *rule.fixed_sigma;
    } else {
        // std of the n(n-1)/2 pairwise distances
        const Eigen::Index pairs = n * (n - 1) / 2;
        double sum = 0.0, sumsq = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) {
                sum += dist(i, j);
                sumsq += dist(i, j) * dist(i, j);
            }
        const double mean = sum / pairs;
        sigma = std::sqrt(std::max(0.0, sumsq / pairs - mean * mean));
        if (sigma <= 0.0) sigma = 1.0;  // all points coincide
    }
    if (sigma <= 0.0) throw ParameterError("kernel width must be positive");
    if (sigma_out) *sigma_out = sigma;

    // epsilon nearest neighbors per sample, ties to the lowest index
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < n; ++i) {
        order.resize(n);
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        order.erase(order.begin() + i);
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) {
                             return dist(i, a) < dist(i, b);
                         });
        for (int k = 0; k < epsilon; ++k) {
            const Eigen::Index j = order[static_cast<size_t>(k)];
            const double w =
                std::exp(-dist(i, j) * dist(i, j) / (2.0 * sigma * sigma));
            W(i, j) = std::max(W(i, j), w);
            W(j, i) = W(i, j);  // union symmetrization
        }
    }
    return W;
}

Eigen::MatrixXd laplacian_sum(const std::vector<Eigen::MatrixXd>& similarities) {
    if (similarities.empty()) throw ParameterError("no similarity matrices given");
    const Eigen::Index n = similarities.front().rows();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& W : similarities) {
        if (W.rows() != n || W.cols() != n)
            throw ShapeError("similarity matrices have mismatched shapes");
        L -= W;
        L.diagonal() += W.rowwise().sum();
    }
    return L;
}

double smoothness_penalty(const Eigen::MatrixXd& U, const Eigen::MatrixXd& L) {
    if (U.cols() != L.rows() || L.rows() != L.cols())
        throw ShapeError("smoothness_penalty: U columns must match L dimension");
    return (U * L).cwiseProduct(U).sum();  // tr(U L U^T)
}

GraphSet build_graph_set(const MultiViewDataset& ds, int epsilon,
                         const WidthRule& rule) {
    GraphSet gs;
    gs.epsilon = epsilon;
    for (const auto& X : ds.views) {
        double sigma = 0.0;
        gs.similarities.push_back(build_knn_graph(X, epsilon, rule, &sigma));
        gs.degrees.push_back(gs.similarities.back().rowwise().sum());
        gs.kernel_widths.push_back(sigma);
    }
    gs.laplacian_sum = laplacian_sum(gs.similarities);
    return gs;
}

}  // namespace mvmc

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mvmc/data.hpp"

namespace mvmc {

/// Kernel width selection for the heat-kernel similarity.
/// Empty fixed_sigma means "standard deviation of all pairwise distances".
struct WidthRule {
    std::optional<double> fixed_sigma;

    static WidthRule std_distance() { return {}; }
    static WidthRule fixed(double sigma) { return {sigma}; }
};

/// Per-view similarity graphs and their summed unnormalized Laplacian.
struct GraphSet {
    std::vector<Eigen::MatrixXd> similarities;  // W^v, symmetric, zero diagonal
    std::vector<Eigen::VectorXd> degrees;       // diag of Lambda^v
    Eigen::MatrixXd laplacian_sum;              // sum_v (Lambda^v - W^v)
    int epsilon = 5;
    std::vector<double> kernel_widths;
};

/// kNN similarity graph with Gaussian heat-kernel weights.
/// Edge (i,j) present when j is among the epsilon nearest neighbors of i
/// or vice versa (union symmetrization); neighbor ties broken by lowest
/// sample index. Diagonal is zero.
Eigen::MatrixXd build_knn_graph(const Eigen::MatrixXd& X, int epsilon,
                                const WidthRule& rule = WidthRule::std_distance(),
                                double* sigma_out = nullptr);

Eigen::MatrixXd laplacian_sum(const std::vector<Eigen::MatrixXd>& similarities);

/// tr(U L U^T)
double smoothness_penalty(const Eigen::MatrixXd& U, const Eigen::MatrixXd& L);

GraphSet build_graph_set(const MultiViewDataset& ds, int epsilon,
                         const WidthRule& rule = WidthRule::std_distance());

}  // namespace mvmc

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mvmc {

/// Semi-NMF pair M ~ B R^T with R >= 0 soft indicators.
struct SemiNmfPair {
    Eigen::MatrixXd B;  // p x r, unconstrained sign
    Eigen::MatrixXd R;  // n x r, entrywise nonnegative
};

/// Lloyd k-means over columns of X, k-means++ seeding, deterministic in seed.
std::vector<int> kmeans_labels(const Eigen::MatrixXd& X, int k, std::uint64_t seed,
                               int max_iters = 50);

/// Warm start: R from k-means labels on M's columns (one-hot + 0.2 smoothing),
/// B from the closed-form least squares.
SemiNmfPair semi_nmf_init(const Eigen::MatrixXd& M, int r, std::uint64_t seed);

/// One semi-NMF alternation: closed-form B, multiplicative R with
/// positive/negative part splitting. ||M - B R^T||_F is non-increasing.
void semi_nmf_update(const Eigen::MatrixXd& M, SemiNmfPair& state);

double semi_nmf_residual(const Eigen::MatrixXd& M, const SemiNmfPair& state);

/// Tri-factorization T ~ C S R^T with C, R >= 0 and unconstrained core S.
struct TriFactorTriple {
    Eigen::MatrixXd C;  // d x c, row-cluster indicators
    Eigen::MatrixXd S;  // c x r
    Eigen::MatrixXd R;  // n x r, column-cluster indicators
};

TriFactorTriple tri_factor_init(const Eigen::MatrixXd& T, int c, int r,
                                std::uint64_t seed);

/// One alternation on ||T - C S R^T||_F^2: closed-form S, multiplicative
/// C and R updates. Objective non-increasing, nonnegativity preserved.
void tri_factor_update(const Eigen::MatrixXd& T, TriFactorTriple& state);

double tri_factor_residual(const Eigen::MatrixXd& T, const TriFactorTriple& state);

/// Row-wise argmax, ties to the lowest cluster index. All-zero rows are
/// assigned cluster 0 and counted in *zero_row_warnings when provided.
std::vector<int> harden_assignments(const Eigen::MatrixXd& R,
                                    int* zero_row_warnings = nullptr);

}  // namespace mvmc

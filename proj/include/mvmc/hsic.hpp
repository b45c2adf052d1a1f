#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mvmc {

/// H = I - (1/n) 11^T. Symmetric idempotent, annihilates constants.
Eigen::MatrixXd centering_matrix(Eigen::Index n);

/// Empirical HSIC with inner-product kernels K = D^T D:
/// (n-1)^{-2} tr(K H K' H).
double hsic_pair(const Eigen::MatrixXd& Dk, const Eigen::MatrixXd& Dk2);

/// Aggregated kernels Ktil^k = (n-1)^{-2} sum_{k' != k} H (D^{k'})^T D^{k'} H.
std::vector<Eigen::MatrixXd> aggregated_kernels(const std::vector<Eigen::MatrixXd>& Ds);

struct DiversityResult {
    double value = 0.0;                        // sum_k tr(D^k Ktil^k (D^k)^T)
    std::vector<Eigen::MatrixXd> aggregated;   // the Ktil^k
};

/// Pairwise HSIC penalty over all ordered pairs k != k'. Zero for h = 1.
DiversityResult diversity_penalty(const std::vector<Eigen::MatrixXd>& Ds);

}  // namespace mvmc

#pragma once

#include <Eigen/Dense>

namespace mvmc {

/// Eigendecomposition of a symmetric matrix, reused across solver sweeps.
struct SymEig {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;

    SymEig() = default;
    explicit SymEig(const Eigen::MatrixXd& A);
};

/// Solves A X + X B = C for symmetric PSD A and B given their
/// eigendecompositions. Denominators are floored at `ridge` so rank-deficient
/// pairs stay solvable (equivalent to a tiny Tikhonov term).
Eigen::MatrixXd solve_sylvester(const SymEig& A, const SymEig& B,
                                const Eigen::MatrixXd& C, double ridge = 1e-12);

}  // namespace mvmc

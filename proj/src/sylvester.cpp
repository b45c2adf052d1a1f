#include "mvmc/sylvester.hpp"

#include <Eigen/Eigenvalues>

#include "mvmc/errors.hpp"

namespace mvmc {

SymEig::SymEig(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success)
        throw Error("symmetric eigendecomposition failed");
    vectors = solver.eigenvectors();
    values = solver.eigenvalues();
}

Eigen::MatrixXd solve_sylvester(const SymEig& A, const SymEig& B,
                                const Eigen::MatrixXd& C, double ridge) {
    // In the eigenbases, (A X + X B = C) decouples entrywise.
    // Near-null directions get the minimum-norm solution (coefficient 0):
    // dividing round-off by a tiny floor would amplify it catastrophically
    // when A is a rank-deficient Gram.
    const double scale = std::max(A.values.cwiseAbs().maxCoeff(),
                                  B.values.cwiseAbs().maxCoeff());
    const double cutoff = std::max(ridge, 1e-12 * scale);
    Eigen::MatrixXd Ct = A.vectors.transpose() * C * B.vectors;
    for (Eigen::Index i = 0; i < Ct.rows(); ++i)
        for (Eigen::Index j = 0; j < Ct.cols(); ++j) {
            const double den = A.values(i) + B.values(j);
            Ct(i, j) = den > cutoff ? Ct(i, j) / den : 0.0;
        }
    return A.vectors * Ct * B.vectors.transpose();
}

}  // namespace mvmc

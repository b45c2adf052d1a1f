#include "mvmc/factorize.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "mvmc/errors.hpp"

namespace mvmc {

namespace {

constexpr double kEpsDiv = 1e-12;   // guards 0/0 inside multiplicative updates
constexpr double kEpsReg = 1e-10;   // ridge on Gram inversions

Eigen::MatrixXd positive_part(const Eigen::MatrixXd& A) {
    return (A.array().abs() + A.array()) / 2.0;
}

Eigen::MatrixXd negative_part(const Eigen::MatrixXd& A) {
    return (A.array().abs() - A.array()) / 2.0;
}

// Ridge-stabilized solve of X * G = Y for G = gram + eps*I.
Eigen::MatrixXd solve_against_gram(const Eigen::MatrixXd& Y,
                                   const Eigen::MatrixXd& gram) {
    const Eigen::Index r = gram.rows();
    Eigen::MatrixXd G = gram;
    G.diagonal().array() += kEpsReg * (1.0 + gram.trace() / r);
    return G.ldlt().solve(Y.transpose()).transpose();
}

}  // namespace

namespace {

std::vector<int> kmeans_once(const Eigen::MatrixXd& X, int k, std::uint64_t seed,
                             int max_iters, double* inertia_out) {
    const Eigen::Index n = X.cols();
    std::mt19937_64 rng(seed);

    // k-means++ seeding
    Eigen::MatrixXd centers(X.rows(), k);
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centers.col(0) = X.col(first(rng));
    Eigen::VectorXd d2 =
        (X.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng), acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2(i);
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = first(rng);
        }
        centers.col(c) = X.col(pick);
        d2 = d2.cwiseMin((X.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
    }

    std::vector<int> labels(n, 0);
    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (X.col(i) - centers.col(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        if (!changed && it > 0) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(X.rows(), k);
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.col(labels[i]) += X.col(i);
            counts(labels[i]) += 1;
        }
        for (int c = 0; c < k; ++c)
            if (counts(c) > 0) centers.col(c) = sums.col(c) / counts(c);
    }
    if (inertia_out) {
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            inertia += (X.col(i) - centers.col(labels[i])).squaredNorm();
        *inertia_out = inertia;
    }
    return labels;
}

}  // namespace

std::vector<int> kmeans_labels(const Eigen::MatrixXd& X, int k, std::uint64_t seed,
                               int max_iters) {
    if (k < 1 || k > X.cols()) throw ParameterError("kmeans: k must be in [1, n]");
    // a few deterministic restarts; keep the lowest-inertia run
    constexpr int kRestarts = 8;
    std::vector<int> best;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < kRestarts; ++r) {
        double inertia = 0.0;
        auto labels = kmeans_once(X, k, seed + 0x9e3779b97f4a7c15ULL * r,
                                  max_iters, &inertia);
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best = std::move(labels);
        }
    }
    return best;
}

SemiNmfPair semi_nmf_init(const Eigen::MatrixXd& M, int r, std::uint64_t seed) {
    const Eigen::Index n = M.cols();
    if (r < 1 || r > n) throw ParameterError("semi_nmf_init: r must be in [1, n]");
    auto labels = kmeans_labels(M, r, seed);
    SemiNmfPair pair;
    pair.R = Eigen::MatrixXd::Constant(n, r, 0.2);
    for (Eigen::Index i = 0; i < n; ++i) pair.R(i, labels[i]) += 1.0;
    pair.B = solve_against_gram(M * pair.R, pair.R.transpose() * pair.R);
    return pair;
}

void semi_nmf_update(const Eigen::MatrixXd& M, SemiNmfPair& state) {
    const Eigen::Index n = M.cols();
    if (state.R.rows() != n || state.B.rows() != M.rows())
        throw ShapeError("semi_nmf_update: factor shapes do not match target");
    if (state.R.cols() > n) throw ParameterError("semi_nmf_update: r exceeds n");

    // B <- M R (R^T R)^-1
    state.B = solve_against_gram(M * state.R, state.R.transpose() * state.R);

    const Eigen::MatrixXd MtB = M.transpose() * state.B;
    const Eigen::MatrixXd BtB = state.B.transpose() * state.B;
    const Eigen::MatrixXd num = positive_part(MtB) + state.R * negative_part(BtB);
    const Eigen::MatrixXd den = negative_part(MtB) + state.R * positive_part(BtB);
    state.R = state.R.array() *
              (num.array() / (den.array() + kEpsDiv)).sqrt();
}

double semi_nmf_residual(const Eigen::MatrixXd& M, const SemiNmfPair& state) {
    return (M - state.B * state.R.transpose()).norm();
}

TriFactorTriple tri_factor_init(const Eigen::MatrixXd& T, int c, int r,
                                std::uint64_t seed) {
    if (c < 1 || c > T.rows())
        throw ParameterError("tri_factor_init: c must be in [1, d]");
    if (r < 1 || r > T.cols())
        throw ParameterError("tri_factor_init: r must be in [1, n]");
    TriFactorTriple t;
    auto row_labels = kmeans_labels(T.transpose(), c, seed);
    auto col_labels = kmeans_labels(T, r, seed + 1);
    t.C = Eigen::MatrixXd::Constant(T.rows(), c, 0.2);
    for (Eigen::Index i = 0; i < T.rows(); ++i) t.C(i, row_labels[i]) += 1.0;
    t.R = Eigen::MatrixXd::Constant(T.cols(), r, 0.2);
    for (Eigen::Index j = 0; j < T.cols(); ++j) t.R(j, col_labels[j]) += 1.0;
    // S from the closed-form least squares
    Eigen::MatrixXd CtC = t.C.transpose() * t.C;
    CtC.diagonal().array() += kEpsReg * (1.0 + CtC.trace() / CtC.rows());
    Eigen::MatrixXd RtR = t.R.transpose() * t.R;
    RtR.diagonal().array() += kEpsReg * (1.0 + RtR.trace() / RtR.rows());
    t.S = CtC.ldlt().solve(t.C.transpose() * T * t.R);
    t.S = RtR.ldlt().solve(t.S.transpose()).transpose();
    return t;
}

void tri_factor_update(const Eigen::MatrixXd& T, TriFactorTriple& state) {
    if (state.C.rows() != T.rows() || state.R.rows() != T.cols())
        throw ShapeError("tri_factor_update: factor shapes do not match target");
    if (state.C.cols() > T.rows() || state.R.cols() > T.cols())
        throw ParameterError("tri_factor_update: cluster counts exceed matrix size");

    // S <- (C^T C)^-1 C^T T R (R^T R)^-1
    Eigen::MatrixXd CtC = state.C.transpose() * state.C;
    CtC.diagonal().array() += kEpsReg * (1.0 + CtC.trace() / CtC.rows());
    Eigen::MatrixXd RtR = state.R.transpose() * state.R;
    RtR.diagonal().array() += kEpsReg * (1.0 + RtR.trace() / RtR.rows());
    state.S = CtC.ldlt().solve(state.C.transpose() * T * state.R);
    state.S = RtR.ldlt().solve(state.S.transpose()).transpose();

    // C: semi-NMF-style multiplicative step on T ~ C (S R^T)
    {
        const Eigen::MatrixXd Z = state.R * state.S.transpose();  // n x c
        const Eigen::MatrixXd TZ = T * Z;
        const Eigen::MatrixXd ZtZ = Z.transpose() * Z;
        const Eigen::MatrixXd num = positive_part(TZ) + state.C * negative_part(ZtZ);
        const Eigen::MatrixXd den = negative_part(TZ) + state.C * positive_part(ZtZ);
        state.C = state.C.array() * (num.array() / (den.array() + kEpsDiv)).sqrt();
    }
    // R: same on T^T ~ R (C S)^T
    {
        const Eigen::MatrixXd Z = state.C * state.S;  // d x r
        const Eigen::MatrixXd TtZ = T.transpose() * Z;
        const Eigen::MatrixXd ZtZ = Z.transpose() * Z;
        const Eigen::MatrixXd num = positive_part(TtZ) + state.R * negative_part(ZtZ);
        const Eigen::MatrixXd den = negative_part(TtZ) + state.R * positive_part(ZtZ);
        state.R = state.R.array() * (num.array() / (den.array() + kEpsDiv)).sqrt();
    }
}

double tri_factor_residual(const Eigen::MatrixXd& T, const TriFactorTriple& state) {
    return (T - state.C * state.S * state.R.transpose()).norm();
}

std::vector<int> harden_assignments(const Eigen::MatrixXd& R,
                                    int* zero_row_warnings) {
    if ((R.array() < 0.0).any())
        throw ParameterError("harden_assignments: R has negative entries");
    std::vector<int> labels(R.rows());
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
        int best = 0;
        double best_val = R(i, 0);
        for (Eigen::Index j = 1; j < R.cols(); ++j)
            if (R(i, j) > best_val) {
                best_val = R(i, j);
                best = static_cast<int>(j);
            }
        if (best_val == 0.0 && zero_row_warnings) ++*zero_row_warnings;
        labels[i] = best;
    }
    return labels;
}

}  // namespace mvmc

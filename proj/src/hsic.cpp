#include "mvmc/hsic.hpp"

#include "mvmc/errors.hpp"

namespace mvmc {

Eigen::MatrixXd centering_matrix(Eigen::Index n) {
    if (n < 2) throw ParameterError("centering matrix needs n >= 2");
    return Eigen::MatrixXd::Identity(n, n) -
           Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
}

namespace {

// H K H without materializing H: double-center K.
Eigen::MatrixXd double_center(const Eigen::MatrixXd& K) {
    const Eigen::Index n = K.rows();
    Eigen::VectorXd row_means = K.rowwise().mean();
    Eigen::VectorXd col_means = K.colwise().mean();
    const double total = row_means.mean();
    Eigen::MatrixXd out = K;
    out.colwise() -= row_means;
    out.rowwise() -= col_means.transpose();
    out.array() += total;
    return out;
}

}  // namespace

double hsic_pair(const Eigen::MatrixXd& Dk, const Eigen::MatrixXd& Dk2) {
    if (Dk.cols() != Dk2.cols())
        throw ShapeError("hsic_pair: sample counts differ");
    const Eigen::Index n = Dk.cols();
    if (n < 2) throw ParameterError("hsic_pair needs n >= 2");
    const Eigen::MatrixXd K1 = Dk.transpose() * Dk;
    const Eigen::MatrixXd K2 = Dk2.transpose() * Dk2;
    const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 1));
    return scale * double_center(K1).cwiseProduct(double_center(K2).transpose()).sum();
}

std::vector<Eigen::MatrixXd> aggregated_kernels(const std::vector<Eigen::MatrixXd>& Ds) {
    const size_t h = Ds.size();
    if (h == 0) throw ParameterError("aggregated_kernels: empty list");
    const Eigen::Index n = Ds.front().cols();
    for (const auto& D : Ds)
        if (D.rows() != Ds.front().rows() || D.cols() != n)
            throw ShapeError("aggregated_kernels: matrix shapes differ");

    const double scale =
        1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 1));
    std::vector<Eigen::MatrixXd> centered;
    centered.reserve(h);
    for (const auto& D : Ds)
        centered.push_back(double_center(D.transpose() * D));

    std::vector<Eigen::MatrixXd> out(h, Eigen::MatrixXd::Zero(n, n));
    for (size_t k = 0; k < h; ++k) {
        for (size_t k2 = 0; k2 < h; ++k2)
            if (k2 != k) out[k] += centered[k2];
        out[k] *= scale;
    }
    return out;
}

DiversityResult diversity_penalty(const std::vector<Eigen::MatrixXd>& Ds) {
    DiversityResult result;
    result.aggregated = aggregated_kernels(Ds);
    for (size_t k = 0; k < Ds.size(); ++k)
        result.value += (Ds[k] * result.aggregated[k]).cwiseProduct(Ds[k]).sum();
    return result;
}

}  // namespace mvmc

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mvmc/data.hpp"

namespace mvmc {

/// Feature space used by the internal indices: each view's rows are
/// standardized (zero-variance rows zeroed), then stacked.
Eigen::MatrixXd concat_standardized(const MultiViewDataset& ds);

/// Mean silhouette over samples; singleton samples contribute 0.
/// Throws MetricError for fewer than two clusters.
double silhouette(const Eigen::MatrixXd& X, const std::vector<int>& labels);

/// Min single-linkage inter-cluster distance over max intra-cluster diameter.
/// Throws MetricError when the max diameter is zero or only one cluster exists.
double dunn_index(const Eigen::MatrixXd& X, const std::vector<int>& labels);

/// NMI with sqrt(H(A) H(B)) normalization. Both partitions trivial -> 1,
/// exactly one trivial -> 0.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

/// Pair-counting Jaccard: n11 / (n11 + n10 + n01), 0/0 -> 0.
double jaccard(const std::vector<int>& a, const std::vector<int>& b);

struct ClusteringReport {
    std::vector<std::vector<int>> labelings;
    // Per-clustering quality; nullopt when the metric is undefined.
    std::vector<std::optional<double>> sc;
    std::vector<std::optional<double>> di;
    // Pairwise diversity, symmetric with unit diagonal.
    Eigen::MatrixXd nmi_matrix;
    Eigen::MatrixXd jc_matrix;
    // Averages: quality over clusterings, diversity over unordered pairs.
    std::optional<double> mean_sc, mean_di, mean_nmi, mean_jc;
    int zero_row_warnings = 0;

    std::string to_json() const;
    std::string to_csv() const;
};

ClusteringReport build_report(const MultiViewDataset& ds,
                              const std::vector<std::vector<int>>& labelings);

}  // namespace mvmc

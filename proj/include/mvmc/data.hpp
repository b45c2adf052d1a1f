#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mvmc/errors.hpp"

namespace mvmc {

/// Multi-view data: m feature matrices over the same n samples.
/// Columns are samples throughout; view v is a d_v x n matrix.
struct MultiViewDataset {
    std::vector<Eigen::MatrixXd> views;
    std::vector<std::string> names;                 // optional per-view ids
    std::vector<std::vector<int>> ground_truths;    // optional labelings, length n each

    int num_views() const { return static_cast<int>(views.size()); }
    Eigen::Index n() const { return views.empty() ? 0 : views.front().cols(); }
    std::vector<Eigen::Index> dims() const;

    /// Throws if any structural invariant is violated.
    void validate() const;
};

/// Recipe for a dataset with planted alternative partitions.
/// Views are assigned to labelings round-robin, so labeling j is
/// recoverable from every view v with v mod num_labelings == j.
struct SyntheticSpec {
    int n = 0;
    int m = 0;
    std::vector<int> view_dims;
    int num_labelings = 1;
    std::vector<int> clusters_per_labeling;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

MultiViewDataset generate_synthetic(const SyntheticSpec& spec);

MultiViewDataset load_dataset(const std::filesystem::path& root);
void save_dataset(const MultiViewDataset& ds, const std::filesystem::path& root);

SyntheticSpec load_synthetic_spec(const std::filesystem::path& json_file);

enum class NormalizeMode { none, unit_columns, zscore_rows };

NormalizeMode parse_normalize_mode(const std::string& s);

struct NormalizeResult {
    MultiViewDataset dataset;
    bool zero_column_warning = false;  // unit_columns hit an all-zero column
};

NormalizeResult normalize_views(const MultiViewDataset& ds, NormalizeMode mode);

}  // namespace mvmc

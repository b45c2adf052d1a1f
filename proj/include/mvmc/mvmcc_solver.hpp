#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "mvmc/data.hpp"
#include "mvmc/factorize.hpp"
#include "mvmc/graph.hpp"
#include "mvmc/mvmc_solver.hpp"

namespace mvmc {

/// Co-clustering config; the number of heads is fixed to the view count.
struct MvmccConfig {
    std::vector<int> r;          // per-view column (sample) cluster counts
    std::vector<int> c;          // per-view row (feature) cluster counts
    double lambda1 = 10.0;
    double lambda2 = 100.0;
    double mu0 = 1e-2;
    double rho = 1.1;
    double mu_max = 1e6;
    int max_outer_iters = 200;
    double tol_obj = 1e-5;
    double tol_feas = 1e-4;
    std::uint64_t seed = 0;
    int epsilon_knn = 5;

    void validate() const;
};

MvmccConfig load_mvmcc_config(const std::filesystem::path& json_file);

struct MvmccState {
    Eigen::MatrixXd U;
    std::vector<Eigen::MatrixXd> Ds;          // one per view
    std::vector<TriFactorTriple> triples;     // (C^v, S^v, R^v)
    std::vector<Eigen::MatrixXd> multipliers; // psi^v, d_v x n
    double mu = 0;
    std::vector<TraceRow> trace;
    bool converged = false;
};

ObjectiveTerms objective_cc(const MvmccState& state, const MultiViewDataset& ds,
                            const GraphSet& graphs, const MvmccConfig& cfg,
                            const std::vector<Eigen::MatrixXd>* frozen_kernels = nullptr);

double feasibility_cc(const MvmccState& state, const MultiViewDataset& ds);

struct MvmccResult {
    MvmccState state;
    std::vector<std::vector<int>> row_labelings;     // from C^v
    std::vector<std::vector<int>> column_labelings;  // from R^v
    int zero_row_warnings = 0;
};

using MvmccObserver =
    std::function<void(int iter, int step, const MvmccState& state)>;

MvmccResult solve_cc(const MultiViewDataset& ds, const MvmccConfig& cfg,
                     const MvmccObserver& observer = nullptr);

MvmccResult solve_cc(const MultiViewDataset& ds, const GraphSet& graphs,
                     const MvmccConfig& cfg, const MvmccObserver& observer = nullptr);

}  // namespace mvmc

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mvmc/data.hpp"
#include "mvmc/factorize.hpp"
#include "mvmc/graph.hpp"

namespace mvmc {

struct MvmcConfig {
    int h = 2;
    std::vector<int> r;          // per-clustering cluster counts
    double lambda1 = 10.0;
    double lambda2 = 100.0;
    double mu0 = 1e-2;
    double rho = 1.1;
    double mu_max = 1e6;
    int max_outer_iters = 200;
    double tol_obj = 1e-5;
    double tol_feas = 1e-4;
    std::uint64_t seed = 0;
    bool use_shared = true;      // false = ablation without the shared matrix
    int epsilon_knn = 5;

    void validate() const;
};

MvmcConfig load_mvmc_config(const std::filesystem::path& json_file);
std::string mvmc_config_to_json(const MvmcConfig& cfg);

struct TraceRow {
    int iter = 0;
    double fit = 0, hsic = 0, smooth = 0, feasibility = 0, mu = 0, total = 0;
};

std::string trace_to_csv(const std::vector<TraceRow>& trace);

struct MvmcState {
    Eigen::MatrixXd U;                         // n x n shared matrix
    std::vector<Eigen::MatrixXd> Ds;           // h individuality matrices
    std::vector<SemiNmfPair> heads;            // (B^k, R^k)
    std::vector<std::vector<Eigen::MatrixXd>> multipliers;  // [v][k], d_v x n
    double mu = 0;
    std::vector<TraceRow> trace;
    bool converged = false;
    bool sum_r_warning = false;                // sum r_k > n at setup
};

struct ObjectiveTerms {
    double fit = 0, hsic = 0, smooth = 0, penalty = 0, total = 0;
};

/// Term breakdown of the augmented objective. When frozen_kernels is given
/// the HSIC term uses those aggregated kernels instead of recomputing them
/// from the state (the quadratic actually minimized within a sweep).
ObjectiveTerms objective(const MvmcState& state, const MultiViewDataset& ds,
                         const GraphSet& graphs, const MvmcConfig& cfg,
                         const std::vector<Eigen::MatrixXd>* frozen_kernels = nullptr);

/// Largest relative constraint residual ||X^v - X^v(U+D^k)||_F / ||X^v||_F.
double feasibility(const MvmcState& state, const MultiViewDataset& ds);

struct MvmcResult {
    MvmcState state;
    std::vector<std::vector<int>> labelings;  // h hardened clusterings
    int zero_row_warnings = 0;
};

/// Observer called during solve: step 0 = sweep start (kernels refreshed),
/// 1..3 = after the factorization / D / U updates of that outer iteration.
using MvmcObserver =
    std::function<void(int iter, int step, const MvmcState& state)>;

MvmcResult solve(const MultiViewDataset& ds, const MvmcConfig& cfg,
                 const MvmcObserver& observer = nullptr);

/// Variant reusing prebuilt graphs (CLI debug dumps, tests).
MvmcResult solve(const MultiViewDataset& ds, const GraphSet& graphs,
                 const MvmcConfig& cfg, const MvmcObserver& observer = nullptr);

}  // namespace mvmc

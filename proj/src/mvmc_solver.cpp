#include "mvmc/mvmc_solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvmc/hsic.hpp"
#include "mvmc/sylvester.hpp"

using json = nlohmann::json;

namespace mvmc {

void MvmcConfig::validate() const {
    if (h < 1) throw ParameterError("mvmc config: h must be >= 1");
    if (static_cast<int>(r.size()) != h)
        throw ParameterError("mvmc config: r must list one cluster count per clustering");
    for (int rk : r)
        if (rk < 2) throw ParameterError("mvmc config: every r_k must be >= 2");
    if (lambda1 < 0 || lambda2 < 0)
        throw ParameterError("mvmc config: weights must be nonnegative");
    if (mu0 <= 0) throw ParameterError("mvmc config: mu0 must be positive");
    if (rho <= 1) throw ParameterError("mvmc config: rho must exceed 1");
    if (mu_max < mu0) throw ParameterError("mvmc config: mu_max must be >= mu0");
    if (max_outer_iters < 1)
        throw ParameterError("mvmc config: max_outer_iters must be >= 1");
    if (epsilon_knn < 1) throw ParameterError("mvmc config: epsilon_knn must be >= 1");
}

namespace {

void config_from_json(const json& j, MvmcConfig& cfg) {
    cfg.h = j.value("h", cfg.h);
    if (j.contains("r")) cfg.r = j["r"].get<std::vector<int>>();
    cfg.lambda1 = j.value("lambda1", cfg.lambda1);
    cfg.lambda2 = j.value("lambda2", cfg.lambda2);
    cfg.mu0 = j.value("mu0", cfg.mu0);
    cfg.rho = j.value("rho", cfg.rho);
    cfg.mu_max = j.value("mu_max", cfg.mu_max);
    cfg.max_outer_iters = j.value("max_outer_iters", cfg.max_outer_iters);
    cfg.tol_obj = j.value("tol_obj", cfg.tol_obj);
    cfg.tol_feas = j.value("tol_feas", cfg.tol_feas);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.use_shared = j.value("use_shared", cfg.use_shared);
    cfg.epsilon_knn = j.value("epsilon_knn", cfg.epsilon_knn);
}

}  // namespace

MvmcConfig load_mvmc_config(const std::filesystem::path& json_file) {
    std::ifstream in(json_file);
    if (!in) throw IngestionError("cannot open config file " + json_file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IngestionError(std::string("bad config JSON: ") + e.what());
    }
    MvmcConfig cfg;
    try {
        config_from_json(j, cfg);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("bad mvmc config: ") + e.what());
    }
    if (cfg.r.empty()) throw ParameterError("mvmc config: missing field 'r'");
    cfg.validate();
    return cfg;
}

std::string mvmc_config_to_json(const MvmcConfig& cfg) {
    json j;
    j["h"] = cfg.h;
    j["r"] = cfg.r;
    j["lambda1"] = cfg.lambda1;
    j["lambda2"] = cfg.lambda2;
    j["mu0"] = cfg.mu0;
    j["rho"] = cfg.rho;
    j["mu_max"] = cfg.mu_max;
    j["max_outer_iters"] = cfg.max_outer_iters;
    j["tol_obj"] = cfg.tol_obj;
    j["tol_feas"] = cfg.tol_feas;
    j["seed"] = cfg.seed;
    j["use_shared"] = cfg.use_shared;
    j["epsilon_knn"] = cfg.epsilon_knn;
    return j.dump(2);
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
    std::ostringstream out;
    out << "iter,fit,hsic,smooth,feasibility,mu,total\n";
    char buf[256];
    for (const auto& row : trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      row.iter, row.fit, row.hsic, row.smooth, row.feasibility,
                      row.mu, row.total);
        out << buf;
    }
    return out.str();
}

ObjectiveTerms objective(const MvmcState& state, const MultiViewDataset& ds,
                         const GraphSet& graphs, const MvmcConfig& cfg,
                         const std::vector<Eigen::MatrixXd>* frozen_kernels) {
    const int h = cfg.h;
    const int m = ds.num_views();
    ObjectiveTerms terms;

    for (int k = 0; k < h; ++k) {
        const Eigen::MatrixXd M = state.U + state.Ds[k];
        terms.fit += (M - state.heads[k].B * state.heads[k].R.transpose()).squaredNorm();
    }
    terms.fit /= h;

    if (cfg.lambda1 > 0 && h > 1) {
        if (frozen_kernels) {
            for (int k = 0; k < h; ++k)
                terms.hsic += (state.Ds[k] * (*frozen_kernels)[k])
                                  .cwiseProduct(state.Ds[k])
                                  .sum();
        } else {
            terms.hsic = diversity_penalty(state.Ds).value;
        }
        terms.hsic *= cfg.lambda1;
    }

    if (cfg.lambda2 > 0)
        terms.smooth = cfg.lambda2 * smoothness_penalty(state.U, graphs.laplacian_sum);

    for (int v = 0; v < m; ++v) {
        for (int k = 0; k < h; ++k) {
            const Eigen::MatrixXd residual =
                ds.views[v] - ds.views[v] * (state.U + state.Ds[k]);
            terms.penalty += state.multipliers[v][k].cwiseProduct(residual).sum() +
                             0.5 * state.mu * residual.squaredNorm();
        }
    }
    terms.penalty /= static_cast<double>(h) * m;

    terms.total = terms.fit + terms.hsic + terms.smooth + terms.penalty;
    return terms;
}

double feasibility(const MvmcState& state, const MultiViewDataset& ds) {
    double worst = 0.0;
    for (int v = 0; v < ds.num_views(); ++v) {
        const double norm = ds.views[v].norm();
        for (size_t k = 0; k < state.Ds.size(); ++k) {
            const double res =
                (ds.views[v] - ds.views[v] * (state.U + state.Ds[k])).norm();
            worst = std::max(worst, norm > 0 ? res / norm : res);
        }
    }
    return worst;
}

MvmcResult solve(const MultiViewDataset& ds, const MvmcConfig& cfg,
                 const MvmcObserver& observer) {
    const GraphSet graphs = build_graph_set(ds, cfg.epsilon_knn);
    return solve(ds, graphs, cfg, observer);
}

MvmcResult solve(const MultiViewDataset& ds, const GraphSet& graphs,
                 const MvmcConfig& cfg, const MvmcObserver& observer) {
    cfg.validate();
    ds.validate();
    const Eigen::Index n = ds.n();
    const int h = cfg.h;
    const int m = ds.num_views();
    for (int rk : cfg.r)
        if (rk > n) throw ParameterError("mvmc config: r_k exceeds sample count");

    // Fixed spectral data reused by every sweep: the summed view Gram and
    // the summed Laplacian.
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    for (const auto& X : ds.views) G += X.transpose() * X;
    const SymEig eigG(G);
    const SymEig eigL(graphs.laplacian_sum);

    MvmcState state;
    state.sum_r_warning = std::accumulate(cfg.r.begin(), cfg.r.end(), 0) > n;
    state.U = cfg.use_shared
                  ? Eigen::MatrixXd((1.0 / static_cast<double>(n)) *
                                    Eigen::MatrixXd::Identity(n, n))
                  : Eigen::MatrixXd::Zero(n, n);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
    state.Ds.resize(h);
    for (int k = 0; k < h; ++k) {
        state.Ds[k].resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) state.Ds[k](i, j) = noise(rng);
    }
    // Break the permutation symmetry between heads: bias D^k towards the Gram
    // of one view (round-robin) so each head latches onto a different source
    // of individuality.  Pure noise leaves all heads statistically identical
    // and the warm starts frequently collapse onto the same partition.
    constexpr double kViewBias = 0.5;
    for (int k = 0; k < h; ++k) {
        const Eigen::MatrixXd Gv = ds.views[k % m].transpose() * ds.views[k % m];
        const double gn = Gv.norm();
        if (gn > 0.0) state.Ds[k] += (kViewBias / gn) * Gv;
    }
    for (int k = 0; k < h; ++k)
        state.heads.push_back(
            semi_nmf_init(state.U + state.Ds[k], cfg.r[k], cfg.seed + 1 + k));
    state.multipliers.resize(m);
    for (int v = 0; v < m; ++v)
        state.multipliers[v].assign(h, Eigen::MatrixXd::Zero(ds.views[v].rows(), n));
    state.mu = cfg.mu0;

    const double hm = static_cast<double>(h) * m;
    double prev_total = 0.0;

    for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
        // Aggregated HSIC kernels frozen for this sweep.
        std::vector<Eigen::MatrixXd> kernels = aggregated_kernels(state.Ds);
        if (observer) observer(iter, 0, state);

        // (1) factorization heads on M^k = U + D^k
        for (int k = 0; k < h; ++k)
            semi_nmf_update(state.U + state.Ds[k], state.heads[k]);
        if (observer) observer(iter, 1, state);

        // (2) D^k: exact quadratic minimization (Sylvester solve)
        for (int k = 0; k < h; ++k) {
            SymEig A;
            A.vectors = eigG.vectors;
            A.values =
                ((2.0 / h) + (state.mu / hm) * eigG.values.array()).matrix();
            const SymEig B(2.0 * cfg.lambda1 * kernels[k]);
            Eigen::MatrixXd rhs =
                (2.0 / h) *
                (state.heads[k].B * state.heads[k].R.transpose() - state.U);
            for (int v = 0; v < m; ++v)
                rhs += (1.0 / hm) * (ds.views[v].transpose() * state.multipliers[v][k]);
            rhs += (state.mu / hm) * (G - G * state.U);
            state.Ds[k] = solve_sylvester(A, B, rhs);
        }
        if (observer) observer(iter, 2, state);

        // (3) U: exact quadratic minimization, skipped in the ablation
        if (cfg.use_shared) {
            SymEig A;
            A.vectors = eigG.vectors;
            A.values = (2.0 + (state.mu / m) * eigG.values.array()).matrix();
            SymEig B;
            B.vectors = eigL.vectors;
            B.values = (2.0 * cfg.lambda2 * eigL.values.array()).matrix();
            Eigen::MatrixXd sum_D = Eigen::MatrixXd::Zero(n, n);
            Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, n);
            for (int k = 0; k < h; ++k) {
                rhs += (2.0 / h) *
                       (state.heads[k].B * state.heads[k].R.transpose() - state.Ds[k]);
                sum_D += state.Ds[k];
                for (int v = 0; v < m; ++v)
                    rhs += (1.0 / hm) *
                           (ds.views[v].transpose() * state.multipliers[v][k]);
            }
            rhs += (state.mu / m) * G - (state.mu / hm) * (G * sum_D);
            state.U = solve_sylvester(A, B, rhs);
        }
        if (observer) observer(iter, 3, state);

        const ObjectiveTerms terms = objective(state, ds, graphs, cfg);
        const double feas = feasibility(state, ds);
        state.trace.push_back({iter, terms.fit, terms.hsic, terms.smooth, feas,
                               state.mu, terms.total});
        if (!std::isfinite(terms.total) || !std::isfinite(feas))
            throw DivergenceError(
                "mvmc solver diverged at iteration " + std::to_string(iter), iter);

        if (iter > 0) {
            const double rel_change =
                std::abs(terms.total - prev_total) / std::max(1.0, std::abs(prev_total));
            if (rel_change < cfg.tol_obj && feas < cfg.tol_feas) {
                state.converged = true;
                break;
            }
        }
        prev_total = terms.total;

        // (4) multiplier ascent and penalty growth
        for (int v = 0; v < m; ++v)
            for (int k = 0; k < h; ++k)
                state.multipliers[v][k] +=
                    state.mu *
                    (ds.views[v] - ds.views[v] * (state.U + state.Ds[k]));
        state.mu = std::min(cfg.rho * state.mu, cfg.mu_max);
    }

    MvmcResult result;
    for (int k = 0; k < h; ++k)
        result.labelings.push_back(
            harden_assignments(state.heads[k].R, &result.zero_row_warnings));
    result.state = std::move(state);
    return result;
}

}  // namespace mvmc
